// Copyright 2026 The shic Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shic/eval.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "shic/container.hpp"
#include "shic/homdiff.hpp"
#include "shic/mask.hpp"
#include "shic/ops.hpp"
#include "shic/tonal.hpp"
#include "shic/trial.hpp"

namespace shic {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<int> grid_levels(const MaskedData& mask, const Quantizer& quant) {
  std::vector<int> levels(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) levels[i] = quant.level(mask.values(i));
  return levels;
}

std::vector<double> values_of(std::span<const int> levels, const Quantizer& quant) {
  std::vector<double> v(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) v[i] = quant.value(levels[i]);
  return v;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

const char* codec_label(Codec codec) {
  switch (codec) {
    case Codec::kRjip: return "rjip";
    case Codec::kRjipA: return "rjip-a";
    case Codec::kTreeIso: return "tree-iso";
    case Codec::kTreeAniso: return "tree-aniso";
  }
  return "?";
}

std::optional<Codec> parse_codec(const std::string& name) {
  for (Codec c : {Codec::kRjip, Codec::kRjipA, Codec::kTreeIso, Codec::kTreeAniso}) {
    if (name == codec_label(c)) return c;
  }
  return std::nullopt;
}

GrayImage decode_any(std::span<const std::uint8_t> file) {
  const ContainerHeader header = peek_header(file);
  if (header.codec == CodecId::kRjip || header.codec == CodecId::kRjipA) return rjip_decode(file);
  return subdivide_decode(file);
}

CodecRun encode_for_ratio(const GrayImage& image, Codec codec, double target_ratio,
                          const EncodeSettings& settings) {
  CodecRun run;
  switch (codec) {
    case Codec::kRjip:
    case Codec::kRjipA: {
      const auto mode = codec == Codec::kRjip ? RjipMode::kIsotropic : RjipMode::kAnisotropic;
      auto found = search_params(image, target_ratio, mode, settings.rjip);
      run.file = std::move(found.best.file);
      run.feasible = found.feasible;
      break;
    }
    case Codec::kTreeIso:
    case Codec::kTreeAniso: {
      const auto mode = codec == Codec::kTreeIso ? TreeMode::kIsotropic : TreeMode::kAnisotropic;
      auto tuned = tune_split_error(image, target_ratio, mode, settings.tree,
                                    settings.tree_tolerance, settings.tree_max_encodes);
      run.file = std::move(tuned.result.file);
      run.feasible = tuned.feasible;
      break;
    }
  }
  return run;
}

MatchedPoint mse_at_ratio(const GrayImage& image, Codec codec, double ratio,
                          const EncodeSettings& settings, int max_encodes) {
  if (!(ratio > 0.0)) throw InvalidArgument("mse_at_ratio: ratio must be positive");
  struct Sample {
    double target, ratio, mse;
  };
  std::vector<Sample> seen;
  auto run = [&](double target) {
    const CodecRun r = encode_for_ratio(image, codec, target, settings);
    seen.push_back({target, static_cast<double>(image.size()) / static_cast<double>(r.file.size()),
                    mse(decode_any(r.file), image)});
  };
  auto below = [&] {
    const Sample* best = nullptr;
    for (const auto& s : seen) {
      if (s.ratio <= ratio && (!best || s.ratio > best->ratio)) best = &s;
    }
    return best;
  };
  auto above = [&] {
    const Sample* best = nullptr;
    for (const auto& s : seen) {
      if (s.ratio >= ratio && (!best || s.ratio < best->ratio)) best = &s;
    }
    return best;
  };
  auto target_extreme = [&](bool lowest) {
    double t = seen.front().target;
    for (const auto& s : seen) t = lowest ? std::min(t, s.target) : std::max(t, s.target);
    return t;
  };

  // The grid codecs overshoot their target, the tree codecs land near it.
  run(ratio);
  while (static_cast<int>(seen.size()) < max_encodes && (!below() || !above())) {
    run(!below() ? target_extreme(true) * 0.88 : target_extreme(false) * 1.12);
  }

  MatchedPoint out;
  out.ratio = ratio;
  out.encodes = static_cast<int>(seen.size());
  const Sample* lo = below();
  const Sample* hi = above();
  if (lo && hi) {
    out.bracketed = true;
    if (hi->ratio == lo->ratio) {
      out.mse = lo->mse;
    } else if (!(lo->mse > 0.0) || !(hi->mse > 0.0)) {
      const double t = (ratio - lo->ratio) / (hi->ratio - lo->ratio);
      out.mse = lo->mse + t * (hi->mse - lo->mse);
    } else {
      const double t = std::log(ratio / lo->ratio) / std::log(hi->ratio / lo->ratio);
      out.mse = std::exp(std::log(lo->mse) + t * (std::log(hi->mse) - std::log(lo->mse)));
    }
  } else {
    const Sample* near = &seen.front();
    for (const auto& s : seen) {
      if (std::abs(std::log(s.ratio / ratio)) < std::abs(std::log(near->ratio / ratio))) near = &s;
    }
    out.mse = near->mse;
  }
  return out;
}

std::vector<RdPoint> rd_sweep(const GrayImage& image, Codec codec,
                              std::span<const double> targets, const EncodeSettings& settings) {
  if (!std::is_sorted(targets.begin(), targets.end())) {
    throw InvalidArgument("rd_sweep: targets must be sorted ascending");
  }
  std::vector<RdPoint> points;
  for (double target : targets) {
    RdPoint pt;
    pt.codec = codec;
    pt.target_ratio = target;
    OpCounter::reset();
    auto t0 = Clock::now();
    const CodecRun run = encode_for_ratio(image, codec, target, settings);
    pt.encode_s = seconds_since(t0);
    pt.op_count = OpCounter::value();
    t0 = Clock::now();
    const GrayImage decoded = decode_any(run.file);
    pt.decode_s = seconds_since(t0);
    pt.achieved_ratio = static_cast<double>(image.size()) / static_cast<double>(run.file.size());
    pt.mse = mse(decoded, image);
    pt.ssim = ssim(decoded, image);
    pt.feasible = run.feasible;
    points.push_back(pt);
  }
  return points;
}

std::string rd_csv(std::span<const RdPoint> points, bool timings) {
  std::string out = std::string(kRdCsvHeader) + "\n";
  for (const auto& p : points) {
    out += codec_label(p.codec);
    out += "," + format_double(p.target_ratio);
    out += "," + format_double(p.achieved_ratio);
    out += "," + format_double(p.mse);
    out += "," + format_double(p.ssim);
    out += "," + format_double(timings ? p.encode_s : 0.0);
    out += "," + format_double(timings ? p.decode_s : 0.0);
    out += "," + std::to_string(p.op_count);
    out += p.feasible ? ",1\n" : ",0\n";
  }
  return out;
}

DiskReport disk_experiment(const DiskOptions& options) {
  DiskReport report;
  const GrayImage disk = make_disk(options.disk);
  const int w = width(disk), h = height(disk);
  MaskedData mask = make_regular_mask(w, h, options.r);
  sample_values(mask, disk);
  const Quantizer quant(options.q);
  const std::vector<int> levels0 = grid_levels(mask, quant);

  auto t0 = Clock::now();
  TonalState iso(mask.positions, levels0, options.q, compute_sigma(mask.size(), w, h), disk);
  report.iso_mse_initial = iso.mse();
  tonal_optimize_iso(iso);
  iso.rebuild();
  report.iso_mse = iso.mse();
  report.iso_s = seconds_since(t0);

  t0 = Clock::now();
  {
    const auto values = values_of(levels0, quant);
    report.hom_mse_initial = mse(inpaint_hom(mask.positions, values, w, h).image, disk);
    std::vector<int> levels = levels0;
    HomLocalModel model(mask.positions, values, disk, options.hom_radius);
    tonal_optimize_trial(model, levels, quant, options.hom_sweeps, options.seed);
    report.hom_mse = mse(inpaint_hom(mask.positions, values_of(levels, quant), w, h).image, disk);
  }
  report.hom_s = seconds_since(t0);

  t0 = Clock::now();
  {
    const LeastSquaresReport ls = tonal_optimize_hom_ls(mask.positions, as_span(mask.values), disk);
    report.hom_ls_mse = ls.mse_after;
    report.hom_ls_iterations = ls.iterations;
  }
  report.hom_ls_s = seconds_since(t0);

  t0 = Clock::now();
  RjipOptions aniso = options.aniso;
  aniso.seed = options.seed;
  const EncodeResult a = rjip_a_encode_fixed(disk, options.r, options.q, 8.0, 1.0, aniso);
  report.aniso_mse = a.mse;
  report.aniso_lambda = a.params.lambda;
  report.aniso_sigma_scale = a.params.sigma_scale;
  report.aniso_s = seconds_since(t0);
  return report;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("loglog_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScalingReport scaling_study(const GrayImage& image, int levels, const ScaleOptions& options) {
  if (levels < 1) throw InvalidArgument("scaling_study: need at least one level");
  ScalingReport report;
  for (int level = 0; level < levels; ++level) {
    const GrayImage img = downsample(image, 1 << level);
    const int w = width(img), h = height(img);
    if (w < 2 * options.r || h < 2 * options.r) break;
    ScalePoint pt;
    pt.width = w;
    pt.height = h;

    OpCounter::reset();
    auto t0 = Clock::now();
    rjip_encode_fixed(img, options.r, options.q);
    pt.rjip_s = seconds_since(t0);
    pt.rjip_ops = OpCounter::value();

    RjipOptions aniso;
    aniso.alternations = options.aniso_alternations;
    aniso.trial_sweeps = 1;
    aniso.seed = options.seed;
    OpCounter::reset();
    t0 = Clock::now();
    rjip_a_encode_fixed(img, options.r, options.q, 8.0, 1.0, aniso);
    pt.rjip_a_s = seconds_since(t0);
    pt.rjip_a_ops = OpCounter::value();

    OpCounter::reset();
    t0 = Clock::now();
    {
      MaskedData mask = make_regular_mask(w, h, options.r);
      sample_values(mask, img);
      const Quantizer quant(options.q);
      std::vector<int> lv = grid_levels(mask, quant);
      HomGlobalModel model(mask.positions, values_of(lv, quant), img);
      tonal_optimize_trial(model, lv, quant, options.hom_sweeps, options.seed);
    }
    pt.hom_s = seconds_since(t0);
    pt.hom_ops = OpCounter::value();
    report.points.push_back(pt);
  }
  if (report.points.size() >= 2) {
    std::vector<double> px, ops, secs;
    for (const auto& p : report.points) {
      px.push_back(p.pixels());
      ops.push_back(static_cast<double>(p.rjip_ops));
      secs.push_back(std::max(p.rjip_s, 1e-9));
    }
    report.rjip_op_slope = loglog_slope(px, ops);
    report.rjip_time_slope = loglog_slope(px, secs);
  }
  return report;
}

std::string scaling_csv(const ScalingReport& report, bool timings) {
  std::string out = "width,height,pixels,codec,seconds,op_count\n";
  for (const auto& p : report.points) {
    const std::string prefix = std::to_string(p.width) + "," + std::to_string(p.height) + "," +
                               std::to_string(static_cast<long long>(p.pixels())) + ",";
    auto row = [&](const char* name, double s, std::uint64_t ops) {
      out += prefix + name + "," + format_double(timings ? s : 0.0) + "," + std::to_string(ops) +
             "\n";
    };
    row("rjip", p.rjip_s, p.rjip_ops);
    row("rjip-a", p.rjip_a_s, p.rjip_a_ops);
    row("hom", p.hom_s, p.hom_ops);
  }
  return out;
}

}  // namespace shic
