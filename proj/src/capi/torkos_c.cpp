#include "torkos/torkos.h"

#include <string>

#include "core/builtins.hpp"
#include "core/suites.hpp"

using namespace torkos;

struct tk_fan {
  Fan fan;
};

struct tk_report {
  std::string json;
  bool passed = false;
};

namespace {

thread_local std::string g_last_error;

static_assert(static_cast<int>(ErrCode::Parse) == TK_ERR_PARSE);
static_assert(static_cast<int>(ErrCode::SignIncoherence) == TK_ERR_SIGN_INCOHERENCE);
static_assert(static_cast<int>(ErrCode::Internal) == TK_ERR_INTERNAL);

template <typename Fn>
tk_status guarded(Fn&& fn) {
  try {
    fn();
    return TK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<tk_status>(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TK_ERR_INTERNAL;
  }
}

std::string joined(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out += " ";
    out += p;
  }
  return out;
}

}  // namespace

extern "C" {

const char* tk_version(void) { return "1.0.0"; }

const char* tk_status_name(tk_status s) {
  if (s == TK_OK) return "Ok";
  return err_code_name(static_cast<ErrCode>(s));
}

const char* tk_last_error(void) { return g_last_error.c_str(); }

const char* tk_builtin_names(void) {
  static const std::string names = joined(builtin_fan_names());
  return names.c_str();
}

const char* tk_suite_names(void) {
  static const std::string names = joined(suite_names());
  return names.c_str();
}

tk_status tk_fan_from_json(const char* json_text, tk_fan** out) {
  *out = nullptr;
  return guarded([&] {
    require(json_text != nullptr, ErrCode::Parse, "fan: null input");
    Fan fan = fan_from_json(parse_json_text(json_text, "fan"));
    *out = new tk_fan{std::move(fan)};
  });
}

tk_status tk_fan_builtin(const char* name, tk_fan** out) {
  *out = nullptr;
  return guarded([&] {
    require(name != nullptr, ErrCode::Parse, "builtin fan: null name");
    *out = new tk_fan{builtin_fan(name)};
  });
}

void tk_fan_free(tk_fan* fan) { delete fan; }

int tk_fan_rank(const tk_fan* fan) { return fan->fan.rank(); }
int tk_fan_num_rays(const tk_fan* fan) { return fan->fan.num_rays(); }
int tk_fan_num_cones(const tk_fan* fan) { return fan->fan.num_cones(); }
int tk_fan_is_complete(const tk_fan* fan) { return fan->fan.complete() ? 1 : 0; }

tk_status tk_run_suite(const tk_fan* fan, const char* suite, const char* sheaf_json,
                       const char* options_json, tk_report** out) {
  *out = nullptr;
  return guarded([&] {
    require(fan != nullptr, ErrCode::Parse, "run suite: null fan");
    require(suite != nullptr, ErrCode::Parse, "run suite: null suite name");
    SuiteJob job;
    job.fan = &fan->fan;
    job.suite = suite;
    if (sheaf_json != nullptr)
      attach_sheaf_json(job, parse_json_text(sheaf_json, "sheaf"));
    if (options_json != nullptr) {
      nlohmann::json opts = parse_json_text(options_json, "options");
      require(opts.is_object(), ErrCode::Parse, "options: expected a JSON object");
      if (opts.contains("jobs")) {
        require(opts["jobs"].is_number_integer() && opts["jobs"].get<int>() >= 1,
                ErrCode::Parse, "options: jobs must be a positive integer");
        job.jobs = opts["jobs"].get<int>();
      }
      if (opts.contains("chambers")) {
        require(opts["chambers"].is_boolean(), ErrCode::Parse,
                "options: chambers must be a boolean");
        job.chambers = opts["chambers"].get<bool>();
      }
      if (opts.contains("window_lo") || opts.contains("window_hi")) {
        require(opts.contains("window_lo") && opts.contains("window_hi") &&
                    opts["window_lo"].is_number_integer() && opts["window_hi"].is_number_integer(),
                ErrCode::Parse, "options: window needs integer window_lo and window_hi");
        long long lo = opts["window_lo"].get<long long>();
        long long hi = opts["window_hi"].get<long long>();
        require(lo <= hi, ErrCode::Parse, "options: window_lo must not exceed window_hi");
        job.window = degree_window({LVec(fan->fan.rank(), lo), LVec(fan->fan.rank(), hi)},
                                   fan->fan.rank(), 0);
      }
    }
    SuiteResult res = run_suite(job);
    *out = new tk_report{res.report.dump(2) + "\n", res.passed};
  });
}

void tk_report_free(tk_report* report) { delete report; }

const char* tk_report_json(const tk_report* report) { return report->json.c_str(); }

int tk_report_passed(const tk_report* report) { return report->passed ? 1 : 0; }

}  // extern "C"
