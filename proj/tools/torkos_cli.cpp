#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "torkos/torkos.h"

namespace {

// Exit codes: 0 all checks pass, 1 a check failed, 2 bad input or an
// inapplicable suite.
constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

int input_error(const std::string& msg) {
  std::fprintf(stderr, "torkos: %s\n", msg.c_str());
  return kExitInputError;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

// "LO..HI" with optional signs, e.g. "-3..3".
bool parse_window(const std::string& text, long long& lo, long long& hi) {
  size_t dots = text.find("..");
  if (dots == std::string::npos) return false;
  try {
    size_t used = 0;
    lo = std::stoll(text.substr(0, dots), &used);
    if (used != dots) return false;
    std::string rest = text.substr(dots + 2);
    hi = std::stoll(rest, &used);
    return used == rest.size() && lo <= hi;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torkos: degreewise verification suites for sheaves on smooth toric fans"};
  app.footer(std::string("builtins: ") + tk_builtin_names() + "\nsuites:   " + tk_suite_names());

  std::string fan_file, builtin, sheaf_file, suite, window_text, out_file;
  bool chambers = false;
  int jobs = 1;
  CLI::Option* fan_opt = app.add_option("--fan", fan_file, "Fan description file (JSON)");
  CLI::Option* builtin_opt =
      app.add_option("--builtin", builtin, "Built-in fan name")->excludes(fan_opt);
  app.add_option("--sheaf", sheaf_file, "Sheaf or line-bundle description file (JSON)");
  app.add_option("--suite", suite, "Suite to run")->required();
  app.add_option("--window", window_text,
                 "Degree window LO..HI in every coordinate (default: derived from the job)");
  app.add_flag("--chambers", chambers,
               "Sweep one representative per sign chamber instead of the default box");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out_file, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }
  if (fan_file.empty() && builtin.empty())
    return input_error("one of --fan or --builtin is required");

  tk_fan* fan = nullptr;
  tk_status st;
  if (!builtin.empty()) {
    st = tk_fan_builtin(builtin.c_str(), &fan);
  } else {
    std::string text;
    if (!read_file(fan_file, text)) return input_error("cannot read " + fan_file);
    st = tk_fan_from_json(text.c_str(), &fan);
  }
  if (st != TK_OK)
    return input_error(std::string(tk_status_name(st)) + ": " + tk_last_error());

  std::string sheaf_text;
  if (!sheaf_file.empty() && !read_file(sheaf_file, sheaf_text)) {
    tk_fan_free(fan);
    return input_error("cannot read " + sheaf_file);
  }

  std::string options = "{\"jobs\": " + std::to_string(jobs);
  if (chambers) options += ", \"chambers\": true";
  if (!window_text.empty()) {
    long long lo = 0, hi = 0;
    if (!parse_window(window_text, lo, hi)) {
      tk_fan_free(fan);
      return input_error("bad --window (expected LO..HI): " + window_text);
    }
    options += ", \"window_lo\": " + std::to_string(lo) + ", \"window_hi\": " + std::to_string(hi);
  }
  options += "}";

  tk_report* report = nullptr;
  st = tk_run_suite(fan, suite.c_str(), sheaf_text.empty() ? nullptr : sheaf_text.c_str(),
                    options.c_str(), &report);
  tk_fan_free(fan);
  if (st != TK_OK)
    return input_error(std::string(tk_status_name(st)) + ": " + tk_last_error());

  int code = tk_report_passed(report) ? kExitPass : kExitCheckFailed;
  if (!out_file.empty()) {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) {
      tk_report_free(report);
      return input_error("cannot write " + out_file);
    }
    out << tk_report_json(report);
  } else {
    std::fputs(tk_report_json(report), stdout);
  }
  tk_report_free(report);
  return code;
}
