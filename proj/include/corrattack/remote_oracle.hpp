#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "corrattack/loss.hpp"

namespace corrattack {

struct HealthInfo {
    std::string status;
    std::string model;
    std::size_t classes = 0;
};

/// Client for the logits wire protocol:
///   POST {endpoint}/v1/logits  {"shape":[C,H,W],"pixels":[...]} -> {"logits":[...]}
///   GET  {endpoint}/v1/health  -> {"status":"ok","model":"...","classes":N}
/// Transport failures and 503 responses are retried with exponential backoff;
/// after `max_attempts` consecutive failures the call throws OracleUnavailable.
/// Malformed responses and 400 replies throw ProtocolError.
class RemoteOracle final : public LogitsOracle {
public:
    struct Options {
        int max_attempts = 3;
        std::chrono::milliseconds backoff{100};
        std::chrono::milliseconds timeout{10000};
    };

    explicit RemoteOracle(std::string endpoint);
    RemoteOracle(std::string endpoint, Options opts);
    ~RemoteOracle() override;

    HealthInfo health();
    std::size_t num_classes() override;

    const std::string& endpoint() const noexcept { return endpoint_; }

protected:
    std::vector<double> compute_logits(const Image& x) override;

private:
    struct Connection;

    std::string endpoint_;
    Options opts_;
    std::unique_ptr<Connection> conn_;
    std::optional<std::size_t> classes_;
};

/// Serializes an image into the request body of /v1/logits.
std::string encode_logits_request(const Image& x);

/// Parses a /v1/logits request body; throws ProtocolError when malformed or
/// when pixels fall outside [0,1].
Image decode_logits_request(const std::string& body);

std::string encode_logits_response(std::span<const double> logits);
std::vector<double> decode_logits_response(const std::string& body);

inline constexpr const char* kOracleUrlEnv = "CORRATTACK_ORACLE_URL";

}  // namespace corrattack
