#include "builtins.hpp"

namespace torkos {

Fan builtin_fan(const std::string& name) {
  if (name == "a2")
    return Fan::build(2, {{1, 0}, {0, 1}}, {{0, 1}});
  if (name == "p1")
    return Fan::build(1, {{1}, {-1}}, {{0}, {1}});
  if (name == "p2")
    return Fan::build(2, {{1, 0}, {0, 1}, {-1, -1}}, {{0, 1}, {1, 2}, {0, 2}});
  if (name == "p1xp1")
    return Fan::build(2, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  if (name == "hirzebruch1")
    return Fan::build(2, {{1, 0}, {0, 1}, {-1, 1}, {0, -1}}, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  fail(ErrCode::Parse, "unknown builtin fan '" + name + "'");
}

std::vector<std::string> builtin_fan_names() { return {"a2", "p1", "p2", "p1xp1", "hirzebruch1"}; }

}  // namespace torkos
