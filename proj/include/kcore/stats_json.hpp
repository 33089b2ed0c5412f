#pragma once

#include <json.hpp>
#include <string>

#include "kcore/engine.hpp"

namespace kcore {

inline std::string bucketing_name(const BucketStrategy& s) {
  switch (s.kind) {
    case BucketKind::single: return "single";
    case BucketKind::fixed: return "fixed:" + std::to_string(s.b);
    case BucketKind::hbs: return "hbs";
    case BucketKind::autoswitch: return "auto";
  }
  return "?";
}

inline nlohmann::json config_to_json(const PeelConfig& cfg, int resolved_threads) {
  return nlohmann::json{
      {"peel", cfg.peel == PeelMode::offline ? "offline" : "online"},
      {"sampling", cfg.sampling ? "on" : "off"},
      {"c", cfg.sampling_params.c},
      {"r", cfg.sampling_params.r},
      {"threshold", cfg.sampling_params.threshold},
      {"vgc", cfg.vgc},
      {"bucketing", bucketing_name(cfg.bucketing)},
      {"theta", cfg.bucketing.theta},
      {"threads", resolved_threads},
      {"seed", cfg.seed},
  };
}

inline nlohmann::json stats_to_json(const PeelStats& s, const PeelConfig& cfg) {
  int threads = cfg.threads > 0 ? cfg.threads : hardware_threads();
  return nlohmann::json{
      {"n", s.n},
      {"m2", s.m2},
      {"kmax", s.kmax},
      {"rounds", s.rounds},
      {"subrounds", s.subrounds},
      {"decrements", s.decrements},
      {"samples", s.samples},
      {"resamples", s.resamples},
      {"restarts", s.restarts},
      {"sum_active", s.sum_active},
      {"max_hot_updates", s.max_hot_updates},
      {"wall_ms", s.wall_ms},
      {"config", config_to_json(cfg, threads)},
  };
}

}  // namespace kcore
