#pragma once

#include <string>
#include <vector>

#include "fan.hpp"

namespace torkos {

// Built-in fans: a2 (affine plane), p1, p2, p1xp1, hirzebruch1.
Fan builtin_fan(const std::string& name);
std::vector<std::string> builtin_fan_names();

}  // namespace torkos
