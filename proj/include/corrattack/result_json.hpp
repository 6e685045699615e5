#pragma once

#include <string>

#include "corrattack/attack.hpp"

namespace corrattack {

/// Stable JSON rendering of a run: summary fields, loss trace, accepted
/// steps, stage history and (optionally) the final image.
std::string attack_result_json(const AttackResult& result, bool include_image = true);

}  // namespace corrattack
