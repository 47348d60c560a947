#include "fogledger/consensus/messages.hpp"

namespace fogledger::consensus {

namespace {

enum class Tag : std::uint8_t { Propose = 1, Confirm, Error, BlockAdd, Skip };

void encode_body(Encoder& enc, const MsgBody& body) {
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Propose>) {
                enc.u8(static_cast<std::uint8_t>(Tag::Propose));
                m.block->encode(enc);
            } else if constexpr (std::is_same_v<T, Confirm>) {
                enc.u8(static_cast<std::uint8_t>(Tag::Confirm));
                enc.u64(m.height).str(m.block_id).digest(m.block_digest);
                m.signature.encode(enc);
            } else if constexpr (std::is_same_v<T, ErrorNotice>) {
                enc.u8(static_cast<std::uint8_t>(Tag::Error));
                enc.u64(m.height).str(m.block_id).u8(static_cast<std::uint8_t>(m.reason));
            } else if constexpr (std::is_same_v<T, BlockAdd>) {
                enc.u8(static_cast<std::uint8_t>(Tag::BlockAdd));
                enc.u64(m.height).str(m.block_id).digest(m.block_digest);
                enc.u32(static_cast<std::uint32_t>(m.bundle.size()));
                for (const auto& s : m.bundle) s.encode(enc);
            } else {
                enc.u8(static_cast<std::uint8_t>(Tag::Skip));
                enc.u64(m.height).u64(m.turn);
            }
        },
        body);
}

MsgBody decode_body(Decoder& dec) {
    switch (static_cast<Tag>(dec.u8())) {
        case Tag::Propose: return Propose{std::make_shared<const chain::Block>(chain::Block::decode(dec))};
        case Tag::Confirm: {
            Confirm c;
            c.height = dec.u64();
            c.block_id = dec.str();
            c.block_digest = dec.digest();
            c.signature = crypto::Signature::decode(dec);
            return c;
        }
        case Tag::Error: {
            ErrorNotice e;
            e.height = dec.u64();
            e.block_id = dec.str();
            std::uint8_t r = dec.u8();
            if (r < 1 || r > static_cast<std::uint8_t>(ErrorReason::Equivocation))
                throw DecodeError("error reason out of range");
            e.reason = static_cast<ErrorReason>(r);
            return e;
        }
        case Tag::BlockAdd: {
            BlockAdd a;
            a.height = dec.u64();
            a.block_id = dec.str();
            a.block_digest = dec.digest();
            std::uint32_t n = dec.u32();
            if (n > dec.remaining()) throw DecodeError("bundle count exceeds input");
            for (std::uint32_t i = 0; i < n; ++i) a.bundle.push_back(crypto::Signature::decode(dec));
            return a;
        }
        case Tag::Skip: {
            SkipTurn s;
            s.height = dec.u64();
            s.turn = dec.u64();
            return s;
        }
    }
    throw DecodeError("unknown consensus message tag");
}

}  // namespace

std::string_view reason_name(ErrorReason r) {
    switch (r) {
        case ErrorReason::WrongHeight: return "WrongHeight";
        case ErrorReason::BadLink: return "BadLink";
        case ErrorReason::WrongProposer: return "WrongProposer";
        case ErrorReason::BadTxSignature: return "BadTxSignature";
        case ErrorReason::BodyHashMismatch: return "BodyHashMismatch";
        case ErrorReason::Malformed: return "Malformed";
        case ErrorReason::Equivocation: return "Equivocation";
    }
    return "Unknown";
}

std::string_view kind_name(const MsgBody& body) {
    static constexpr std::string_view names[] = {"Propose", "Confirm", "Error", "BlockAdd", "SkipTurn"};
    return names[body.index()];
}

Bytes ConsensusMsg::body_bytes() const {
    Encoder enc;
    enc.str("fogledger/consensus");
    sender.encode(enc);
    encode_body(enc, body);
    return enc.take();
}

Bytes ConsensusMsg::serialize() const {
    Encoder enc;
    sender.encode(enc);
    encode_body(enc, body);
    sender_sig.encode(enc);
    return enc.take();
}

ConsensusMsg ConsensusMsg::deserialize(ByteView data) {
    Decoder dec(data);
    ConsensusMsg m;
    m.sender = NodeAddress::decode(dec);
    m.body = decode_body(dec);
    m.sender_sig = crypto::Signature::decode(dec);
    dec.expect_done();
    return m;
}

std::size_t ConsensusMsg::wire_size() const { return serialize().size(); }

Bytes confirm_message(std::uint64_t height, const Digest& block_digest) {
    Encoder enc;
    enc.str("fogledger/confirm").u64(height).digest(block_digest);
    return enc.take();
}

ConsensusMsg seal(const crypto::CryptoSuite& suite, const crypto::KeyPair& key, MsgBody body) {
    ConsensusMsg m;
    m.sender = key.owner;
    m.body = std::move(body);
    m.sender_sig = suite.sign(key, m.body_bytes());
    return m;
}

bool verify_envelope(const crypto::CryptoSuite& suite, const ServerRoster& roster, const ConsensusMsg& msg) {
    if (!roster.contains(msg.sender) || msg.sender_sig.signer != msg.sender) return false;
    return suite.verify(msg.body_bytes(), msg.sender_sig);
}

}  // namespace fogledger::consensus
