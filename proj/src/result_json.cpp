#include "corrattack/result_json.hpp"

#include <json.hpp>

namespace corrattack {

std::string attack_result_json(const AttackResult& result, bool include_image) {
    using nlohmann::json;
    json out;
    out["success"] = result.success;
    out["queries"] = result.queries;
    out["termination"] = result.termination;
    out["final_loss"] = result.final_loss;

    json trace = json::array();
    for (const auto& [q, loss] : result.loss_trace) trace.push_back({q, loss});
    out["loss_trace"] = std::move(trace);

    json accepted = json::array();
    for (const auto& a : result.accepted)
        accepted.push_back({{"query", a.query},
                            {"stage", a.stage},
                            {"block_size", a.block_size},
                            {"block", {a.block.i, a.block.j, a.block.k}},
                            {"step", a.step},
                            {"loss", a.loss}});
    out["accepted"] = std::move(accepted);

    json stages = json::array();
    for (const auto& s : result.stages)
        stages.push_back({{"stage", s.stage},
                          {"block_size", s.block_size},
                          {"pass", s.pass},
                          {"actions", s.actions},
                          {"queries_start", s.queries_start},
                          {"queries_end", s.queries_end},
                          {"evaluations", s.evaluations},
                          {"accepted", s.accepted},
                          {"stop", s.stop}});
    out["stages"] = std::move(stages);

    if (include_image) {
        const Shape& sh = result.final_image.shape();
        const auto px = result.final_image.pixels();
        out["final_image"] = {{"shape", {sh.channels, sh.height, sh.width}},
                              {"pixels", std::vector<double>(px.begin(), px.end())}};
    }
    return out.dump() + "\n";
}

}  // namespace corrattack
