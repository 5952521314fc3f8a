#include "anytime_ville/anytime_ville.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "anytime_ville/curve_json.hpp"
#include "anytime_ville/curves.hpp"
#include "anytime_ville/errors.hpp"
#include "anytime_ville/floorhugger.hpp"
#include "anytime_ville/lil.hpp"
#include "anytime_ville/simharness.hpp"
#include "anytime_ville/ville.hpp"

struct av_curve {
  av::Curve curve;
};

struct av_dampener {
  av::Dampener h;
};

struct av_coverage_report {
  av::sim::CoverageReport report;
};

namespace {

thread_local std::string last_error;

av_status fail(av_status status, const char* what) {
  last_error = what;
  return status;
}

template <class Fn>
av_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return AV_OK;
  } catch (const av::DomainError& e) {
    return fail(AV_ERR_DOMAIN, e.what());
  } catch (const av::ExtrapolationError& e) {
    return fail(AV_ERR_EXTRAPOLATION, e.what());
  } catch (const av::UnsupportedError& e) {
    return fail(AV_ERR_UNSUPPORTED, e.what());
  } catch (const av::InvalidQuery& e) {
    return fail(AV_ERR_INVALID_QUERY, e.what());
  } catch (const av::CalibrationError& e) {
    return fail(AV_ERR_CALIBRATION, e.what());
  } catch (const av::OverflowError& e) {
    return fail(AV_ERR_OVERFLOW, e.what());
  } catch (const av::NumericalError& e) {
    return fail(AV_ERR_NUMERICAL, e.what());
  } catch (const av::ParseError& e) {
    return fail(AV_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(AV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(AV_ERR_INTERNAL, e.what());
  }
}

#define AV_REQUIRE(cond, msg) \
  if (!(cond)) return fail(AV_ERR_ARGUMENT, msg)

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(std::FILE* fp, double v) { std::fprintf(fp, "%.17g", v); }

av::lil::Form to_form(av_lil_form form) {
  switch (form) {
    case AV_LIL_SIMPLER: return av::lil::Form::Simpler;
    case AV_LIL_IMPLICIT: return av::lil::Form::Implicit;
    case AV_LIL_EXPLICIT: break;
  }
  return av::lil::Form::Explicit;
}

av::floorhugger::Config sim_config(const av_curve* f, const av_curve* g, const av_sim_config* cfg) {
  return {f->curve, g->curve, cfg->m0, cfg->horizon, cfg->n_paths, cfg->seed, cfg->threads};
}

}  // namespace

extern "C" {

const char* av_last_error(void) { return last_error.c_str(); }

const char* av_status_name(av_status status) {
  switch (status) {
    case AV_OK: return "ok";
    case AV_ERR_DOMAIN: return "domain error";
    case AV_ERR_EXTRAPOLATION: return "extrapolation error";
    case AV_ERR_UNSUPPORTED: return "unsupported";
    case AV_ERR_INVALID_QUERY: return "invalid query";
    case AV_ERR_CALIBRATION: return "calibration error";
    case AV_ERR_OVERFLOW: return "overflow";
    case AV_ERR_NUMERICAL: return "numerical failure";
    case AV_ERR_PARSE: return "parse error";
    case AV_ERR_IO: return "i/o error";
    case AV_ERR_ARGUMENT: return "bad argument";
    case AV_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void av_string_free(char* s) { std::free(s); }

av_status av_curve_from_json(const char* json, av_curve** out) {
  AV_REQUIRE(json != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new av_curve{av::curve_from_json(json)}; });
}

av_status av_curve_to_json(const av_curve* curve, char** out) {
  AV_REQUIRE(curve != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = dup_string(av::curve_to_json(curve->curve)); });
}

av_status av_curve_clone(const av_curve* curve, av_curve** out) {
  AV_REQUIRE(curve != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new av_curve{curve->curve}; });
}

void av_curve_free(av_curve* curve) { delete curve; }

av_status av_curve_eval(const av_curve* curve, double x, double* out) {
  AV_REQUIRE(curve != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = curve->curve.eval(x); });
}

av_status av_curve_derivative(const av_curve* curve, double x, double* out) {
  AV_REQUIRE(curve != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = curve->curve.derivative(x); });
}

av_status av_curve_equal(const av_curve* a, const av_curve* b, int* out) {
  AV_REQUIRE(a != nullptr && b != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = a->curve == b->curve ? 1 : 0; });
}

av_status av_dampener_from_json(const char* json, av_dampener** out) {
  AV_REQUIRE(json != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new av_dampener{av::dampener_from_json(json)}; });
}

av_status av_dampener_to_json(const av_dampener* h, char** out) {
  AV_REQUIRE(h != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = dup_string(av::dampener_to_json(h->h)); });
}

av_status av_dampener_value(const av_dampener* h, double xi, double* out) {
  AV_REQUIRE(h != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = h->h.value(xi); });
}

void av_dampener_free(av_dampener* h) { delete h; }

av_status av_crossing_bound(const av_curve* f, const av_curve* g, double m0, int64_t horizon,
                            av_bracket* out) {
  AV_REQUIRE(f != nullptr && g != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    av::BoundQuery q{f->curve, g->curve, m0, std::nullopt};
    if (horizon > 0) q.horizon = horizon;
    const auto b = av::crossing_bound(q);
    *out = {b.lower, b.upper, b.truncation_horizon};
  });
}

av_status av_s_tail(const av_curve* f, const av_curve* g, int64_t n, int64_t horizon,
                    av_bracket* out) {
  AV_REQUIRE(f != nullptr && g != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const auto b = av::s_tail(f->curve, g->curve, n, horizon);
    *out = {b.lower, b.upper, b.truncation_horizon};
  });
}

av_status av_continuous_bound(const av_curve* f, const av_curve* g, double m0,
                              av_continuous* out) {
  AV_REQUIRE(f != nullptr && g != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const auto c = av::continuous_bound(f->curve, g->curve, m0);
    *out = {c.value, c.exponent, c.divergent ? 1 : 0};
  });
}

av_status av_calibrate_quadratic(double delta, double a, double* b_out) {
  AV_REQUIRE(b_out != nullptr, "null argument");
  return guarded([&] { *b_out = av::calibrate_quadratic(delta, a); });
}

av_status av_calibrate_expconcave(const av_dampener* h, double delta, av_dampener** out) {
  AV_REQUIRE(h != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new av_dampener{av::calibrate_expconcave(h->h, delta)}; });
}

av_status av_jump_prob(const av_curve* f, const av_curve* g, int64_t n, double* out) {
  AV_REQUIRE(f != nullptr && g != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = av::floorhugger::jump_prob(f->curve, g->curve, n); });
}

av_status av_simulate(const av_curve* f, const av_curve* g, const av_sim_config* cfg,
                      av_sim_summary* out) {
  AV_REQUIRE(f != nullptr && g != nullptr && cfg != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    const auto s = av::floorhugger::simulate(sim_config(f, g, cfg));
    *out = {s.n_paths, s.n_crossed, s.empirical_prob, s.std_error};
  });
}

av_status av_dump_paths(const av_curve* f, const av_curve* g, const av_sim_config* cfg,
                        int64_t count, const char* path) {
  AV_REQUIRE(f != nullptr && g != nullptr && cfg != nullptr && path != nullptr, "null argument");
  std::FILE* fp = nullptr;
  const av_status status = guarded([&] {
    const auto config = sim_config(f, g, cfg);
    const auto paths = av::floorhugger::simulate_paths(config, count);
    const av::floorhugger::FloorTable table(config.f, config.g, config.m0, config.horizon);
    fp = std::fopen(path, "w");
    if (fp == nullptr) return;
    std::fputs("path_id,n,M,K\n", fp);
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto k = av::floorhugger::k_process(paths[i], table);
      for (std::size_t n = 0; n < k.size(); ++n) {
        std::fprintf(fp, "%zu,%zu,", i, n);
        put(fp, paths[i].values[n]);
        std::fputc(',', fp);
        put(fp, k[n]);
        std::fputc('\n', fp);
      }
    }
  });
  if (status != AV_OK) {
    if (fp != nullptr) std::fclose(fp);
    return status;
  }
  if (fp == nullptr) return fail(AV_ERR_IO, (std::string("cannot open ") + path).c_str());
  if (std::fclose(fp) != 0) return fail(AV_ERR_IO, (std::string("cannot write ") + path).c_str());
  return AV_OK;
}

av_status av_lil_I(double x, double* out) {
  AV_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = av::lil::I_series(x); });
}

av_status av_lil_ell(double x, double* out) {
  AV_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = av::lil::ell(x); });
}

av_status av_lil_remainder(double tau, double* out) {
  AV_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = av::lil::remainder_R(tau); });
}

av_status av_lil_invert_threshold(double tau, double* out) {
  AV_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = av::lil::invert_threshold(tau); });
}

av_status av_lil_martingale_value(double n, double s, double* out) {
  AV_REQUIRE(out != nullptr, "null argument");
  return guarded([&] { *out = av::lil::martingale_value(n, s); });
}

av_status av_lil_curve(double delta, double kappa, av_lil_form form, int normalized,
                       const double* ns, size_t count, double* out) {
  AV_REQUIRE(count == 0 || (ns != nullptr && out != nullptr), "null argument");
  return guarded([&] {
    const av::lil::LilParams p(delta, kappa);
    const auto f = to_form(form);
    for (size_t i = 0; i < count; ++i) {
      const double s = av::lil::sum_bound(ns[i], p, f);
      out[i] = normalized ? s / std::sqrt(ns[i] + 1.0) : s;
    }
  });
}

av_status av_coverage_run(const av_coverage_config* cfg, av_coverage_report** out) {
  AV_REQUIRE(cfg != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    av::sim::CoverageConfig c;
    c.delta = cfg->delta;
    c.n_steps = cfg->n_steps;
    c.n_reps = cfg->n_reps;
    c.seed = cfg->seed;
    c.kappa = cfg->kappa;
    c.distribution = cfg->sigma == 1.0 ? av::sim::Distribution::StandardNormal
                                       : av::sim::Distribution::ScaledNormal;
    c.sigma = cfg->sigma;
    c.form = to_form(cfg->form);
    c.threads = cfg->threads;
    *out = new av_coverage_report{av::sim::run_coverage(c)};
  });
}

int64_t av_coverage_violations(const av_coverage_report* r) { return r ? r->report.violations : 0; }

int64_t av_coverage_reps(const av_coverage_report* r) { return r ? r->report.n_reps : 0; }

double av_coverage_violation_rate(const av_coverage_report* r) {
  return r ? r->report.violation_rate : 0.0;
}

size_t av_coverage_histogram_size(const av_coverage_report* r) {
  return r ? r->report.histogram.size() : 0;
}

av_status av_coverage_histogram_entry(const av_coverage_report* r, size_t i, int64_t* t,
                                      int64_t* count) {
  AV_REQUIRE(r != nullptr && t != nullptr && count != nullptr, "null argument");
  AV_REQUIRE(i < r->report.histogram.size(), "histogram index out of range");
  *t = r->report.histogram[i].first;
  *count = r->report.histogram[i].second;
  return AV_OK;
}

void av_coverage_free(av_coverage_report* r) { delete r; }

}  // extern "C"
