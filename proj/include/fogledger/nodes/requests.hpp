#pragma once

#include <variant>

#include "fogledger/crypto/group_cipher.hpp"
#include "fogledger/crypto/session.hpp"
#include "fogledger/chain/types.hpp"

namespace fogledger::nodes {

struct DataRequest {
    std::string request_id;
    NodeAddress requester;
    std::vector<std::string> tx_ids;
    crypto::SessionKey session;
};

struct DataResponse {
    std::string request_id;
    chain::BlockPtr block;
    crypto::AccessToken token;
    NodeAddress served_by;
};

struct Forwarded {
    DataRequest request;
    NodeAddress upstream;
};

enum class DenyReason { AuthExpired, NotListed, UnknownGroup, WrongScope, NotFound };
std::string_view reason_name(DenyReason r);

struct Denied {
    std::string request_id;
    DenyReason reason = DenyReason::NotListed;
};

using RequestOutcome = std::variant<DataResponse, Forwarded, Denied>;

}  // namespace fogledger::nodes
