#include "fogledger/chain/chain_file.hpp"

#include <fstream>
#include <iterator>

namespace fogledger::chain {

namespace {

constexpr std::uint8_t kHeaderRecord = 0;
constexpr std::uint8_t kBlockRecord = 1;

std::filesystem::path index_path(const std::filesystem::path& path) {
    auto p = path;
    p += ".idx";
    return p;
}

Bytes read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ChainError(ChainErrc::CorruptFile, "cannot open " + path.string());
    return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_all(const std::filesystem::path& path, const Bytes& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::variant<BlockHeader, Block> decode_record(Decoder& dec) {
    std::uint32_t len = dec.u32();
    ByteView rec = dec.raw(len);
    if (rec.empty()) throw DecodeError("empty record");
    Decoder rd(rec.subspan(1));
    if (rec[0] == kHeaderRecord) {
        BlockHeader h = BlockHeader::decode(rd);
        rd.expect_done();
        return h;
    }
    if (rec[0] == kBlockRecord) {
        Block b = Block::decode(rd);
        rd.expect_done();
        return b;
    }
    throw DecodeError("unknown record kind");
}

}  // namespace

void save_chain(const ChainStore& store, const std::filesystem::path& path) {
    Encoder data;
    Encoder idx;
    for (const auto& h : store.headers()) {
        idx.u64(h.height).u64(data.data().size());
        Encoder rec;
        if (BlockPtr b = store.body(h.height)) {
            rec.u8(kBlockRecord);
            b->encode(rec);
        } else {
            rec.u8(kHeaderRecord);
            h.encode(rec);
        }
        data.bytes(rec.data());
    }
    write_all(path, data.data());
    write_all(index_path(path), idx.data());
}

ChainStore load_chain(const std::filesystem::path& path, Tier tier) {
    Bytes data = read_all(path);
    ChainStore store(tier);
    try {
        Decoder dec(data);
        while (!dec.done()) {
            auto rec = decode_record(dec);
            if (auto* h = std::get_if<BlockHeader>(&rec)) {
                if (tier == Tier::Full) throw ChainError(ChainErrc::CorruptFile, "full chain file lacks a body");
                if (store.append_header(*h) != AppendResult::Ok)
                    throw ChainError(ChainErrc::CorruptFile, "broken chain at height " + std::to_string(h->height));
            } else {
                auto block = std::make_shared<const Block>(std::get<Block>(std::move(rec)));
                if (store.append_header(block->header) != AppendResult::Ok)
                    throw ChainError(ChainErrc::CorruptFile,
                                     "broken chain at height " + std::to_string(block->header.height));
                if (tier != Tier::HeaderOnly) store.put_body(block);
            }
        }
    } catch (const DecodeError& e) {
        throw ChainError(ChainErrc::CorruptFile, std::string("malformed chain file: ") + e.what());
    }
    return store;
}

std::variant<BlockHeader, Block> read_record(const std::filesystem::path& path, std::uint64_t height) {
    Bytes idx = read_all(index_path(path));
    if (idx.size() % 16 != 0) throw ChainError(ChainErrc::CorruptFile, "index size is not a multiple of 16");
    Decoder id(idx);
    std::optional<std::uint64_t> offset;
    while (!id.done()) {
        std::uint64_t h = id.u64();
        std::uint64_t off = id.u64();
        if (h == height) offset = off;
    }
    if (!offset) throw ChainError(ChainErrc::UnknownHeader, "height not in index");
    Bytes data = read_all(path);
    if (*offset >= data.size()) throw ChainError(ChainErrc::CorruptFile, "index offset past end of file");
    try {
        Decoder dec(ByteView{data}.subspan(*offset));
        return decode_record(dec);
    } catch (const DecodeError& e) {
        throw ChainError(ChainErrc::CorruptFile, std::string("malformed record: ") + e.what());
    }
}

}  // namespace fogledger::chain
