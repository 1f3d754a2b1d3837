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

#include "shic/rjip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "shic/anisotropic.hpp"
#include "shic/container.hpp"
#include "shic/entropy.hpp"
#include "shic/golden.hpp"
#include "shic/mask.hpp"
#include "shic/tonal.hpp"
#include "shic/trial.hpp"

namespace shic {

namespace {

// Bit-history order of the adaptive model for RJIP-A level fields.

constexpr double kLambdaMin = 0.5;
constexpr double kLambdaMax = 255.0;
constexpr double kScaleMin = 0.5;
constexpr double kScaleMax = 2.5;

int mod(int a, int q) { return ((a % q) + q) % q; }

int predict(const AccumulationMaps& maps, Point p, const Quantizer& quant) {
  const double w = maps.w(p.y, p.x);
  return w > 0.0 ? quant.level(maps.v(p.y, p.x) / w) : 0;
}

void check_params(const GrayImage& image, int r, int q) {
  if (r < 1 || r > 255) throw InvalidArgument("rjip: r must lie in [1, 255]");
  if (q < 2 || q > 256) throw InvalidArgument("rjip: q must lie in [2, 256]");
  if (image.rows() < 2 || image.cols() < 2 || image.rows() > 65535 || image.cols() > 65535) {
    throw InvalidArgument("rjip: unsupported image size");
  }
}

std::vector<int> sampled_levels(const MaskedData& mask, const Quantizer& quant) {
  std::vector<int> levels(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) levels[i] = quant.level(mask.values(i));
  return levels;
}

std::vector<double> level_values(std::span<const int> levels, const Quantizer& quant) {
  std::vector<double> values(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) values[i] = quant.value(levels[i]);
  return values;
}

std::vector<double> scaled_sigmas(std::size_t n, int w, int h, double scale) {
  return std::vector<double>(n, scale * compute_sigma(n, w, h));
}

}  // namespace

std::vector<int> rjip_residuals(std::span<const Point> positions, std::span<const int> levels,
                                int q, const IsoKernel& kernel, AccumulationMaps& maps,
                                const StepObserver& observer) {
  const Quantizer quant(q);
  std::vector<int> residuals(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const int p = predict(maps, positions[i], quant);
    residuals[i] = mod(p - levels[i], q);
    add_contribution(maps, positions[i], quant.value(levels[i]), kernel);
    if (observer) observer(i, maps);
  }
  return residuals;
}

std::vector<int> rjip_levels(std::span<const Point> positions, std::span<const int> residuals,
                             int q, const IsoKernel& kernel, AccumulationMaps& maps,
                             const StepObserver& observer) {
  const Quantizer quant(q);
  std::vector<int> levels(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const int p = predict(maps, positions[i], quant);
    levels[i] = mod(p - residuals[i], q);
    add_contribution(maps, positions[i], quant.value(levels[i]), kernel);
    if (observer) observer(i, maps);
  }
  return levels;
}

EncodeResult rjip_encode_fixed(const GrayImage& image, int r, int q, const RjipOptions& options) {
  check_params(image, r, q);
  const int w = width(image), h = height(image);
  MaskedData mask = make_regular_mask(w, h, r);
  sample_values(mask, image);
  const Quantizer quant(q);
  const double sigma = compute_sigma(mask.size(), w, h);

  TonalState state(mask.positions, sampled_levels(mask, quant), q, sigma, image);
  tonal_optimize_iso(state, options.tonal_sweeps);
  const std::vector<int> levels(state.levels().begin(), state.levels().end());

  const IsoKernel kernel(sigma);
  AccumulationMaps maps(w, h);
  const auto residuals = rjip_residuals(mask.positions, levels, q, kernel, maps);
  const auto values = level_values(levels, quant);

  const FrequencyTable table = build_table(residuals, q);
  const auto payload = range_encode(residuals, table);

  ByteWriter out;
  write_header(out, {CodecId::kRjip, w, h, q});
  out.u8(static_cast<std::uint32_t>(r));
  for (auto c : table.counts) out.u16(c);
  out.u32(static_cast<std::uint32_t>(payload.size()));
  out.bytes(payload);

  EncodeResult result;
  result.file = out.take();
  result.reconstruction = normalize(maps, hole_fill(values));
  result.params = {r, q, RjipMode::kIsotropic, 0.0, 1.0};
  result.mse = mse(result.reconstruction, image);
  return result;
}

GrayImage rjip_a_reconstruct(int width, int height, int r, int q, std::span<const int> levels,
                             double lambda, double sigma_scale) {
  const MaskedData mask = make_regular_mask(width, height, r);
  if (levels.size() != mask.size()) throw InvalidArgument("rjip-a: level count mismatch");
  const auto values = level_values(levels, Quantizer(q));
  const auto sigmas = scaled_sigmas(mask.size(), width, height, sigma_scale);
  return inpaint_aniso(mask.positions, values, sigmas, lambda, width, height);
}

EncodeResult rjip_a_encode_fixed(const GrayImage& image, int r, int q, double lambda,
                                 double sigma_scale, const RjipOptions& options) {
  check_params(image, r, q);
  const int w = width(image), h = height(image);
  MaskedData mask = make_regular_mask(w, h, r);
  sample_values(mask, image);
  const Quantizer quant(q);
  std::vector<int> levels = sampled_levels(mask, quant);

  lambda = fixed_roundtrip(std::clamp(lambda, kLambdaMin, kLambdaMax), kLambdaScale);
  sigma_scale = fixed_roundtrip(std::clamp(sigma_scale, kScaleMin, kScaleMax), kSigmaScale);

  auto error_for = [&](double lam, double scale) {
    return mse(rjip_a_reconstruct(w, h, r, q, levels, lam, scale), image);
  };

  if (options.alternations > 0) {
    // The error surface has several basins; a coarse grid picks the start.
    double best = error_for(lambda, sigma_scale);
    for (double lam : {0.5, 2.0, 8.0, 32.0, 128.0}) {
      for (double scale : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        const double e = error_for(lam, scale);
        if (e < best) {
          best = e;
          lambda = lam;
          sigma_scale = scale;
        }
      }
    }
  }

  for (int round = 0; round < options.alternations; ++round) {
    double current = error_for(lambda, sigma_scale);
    // lambda is searched on a log scale; every probe is snapped to the stored grid.
    auto by_lambda = [&](double t) {
      return error_for(fixed_roundtrip(std::exp(t), kLambdaScale), sigma_scale);
    };
    const auto best_l = golden_section(by_lambda, std::log(kLambdaMin), std::log(kLambdaMax),
                                       options.golden_iterations);
    if (best_l.value < current) {
      lambda = fixed_roundtrip(std::exp(best_l.x), kLambdaScale);
      current = best_l.value;
    }

    auto by_scale = [&](double s) { return error_for(lambda, fixed_roundtrip(s, kSigmaScale)); };
    const auto best_s = golden_section(by_scale, kScaleMin, kScaleMax, options.golden_iterations);
    if (best_s.value < current) sigma_scale = fixed_roundtrip(best_s.x, kSigmaScale);

    const auto values = level_values(levels, quant);
    const auto sigmas = scaled_sigmas(mask.size(), w, h, sigma_scale);
    ShepardTrialModel model(mask.positions, values, sigmas, lambda, image);
    tonal_optimize_trial(model, levels, quant, options.trial_sweeps,
                         options.seed + static_cast<std::uint64_t>(round));
  }

  const int fw = field_width(q);
  const auto payload = field_encode(levels, fw);

  ByteWriter out;
  write_header(out, {CodecId::kRjipA, w, h, q});
  out.u8(static_cast<std::uint32_t>(r));
  out.u16(to_fixed(lambda, kLambdaScale));
  out.u16(to_fixed(sigma_scale, kSigmaScale));
  out.u32(static_cast<std::uint32_t>(payload.size()));
  out.bytes(payload);

  EncodeResult result;
  result.file = out.take();
  result.reconstruction = rjip_a_reconstruct(w, h, r, q, levels, lambda, sigma_scale);
  result.params = {r, q, RjipMode::kAnisotropic, lambda, sigma_scale};
  result.mse = mse(result.reconstruction, image);
  return result;
}

GrayImage rjip_decode(std::span<const std::uint8_t> file) {
  using Kind = ParseError::Kind;
  ByteReader in(file);
  const ContainerHeader header = read_header(in);
  const int w = header.width, h = header.height, q = header.q;
  if (header.codec != CodecId::kRjip && header.codec != CodecId::kRjipA) {
    throw ParseError(Kind::kCodec, std::string("rjip: cannot decode ") + codec_name(header.codec));
  }
  const int r = static_cast<int>(in.u8());
  if (r < 1) throw ParseError(Kind::kPayload, "rjip: grid spacing 0");
  if (w < 2 || h < 2) throw ParseError(Kind::kPayload, "rjip: image too small");
  const MaskedData mask = make_regular_mask(w, h, r);

  if (header.codec == CodecId::kRjip) {
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(q));
    for (auto& c : counts) c = in.u16();
    const FrequencyTable table = table_from_counts(std::move(counts));
    const auto payload = in.bytes(in.u32());
    if (in.remaining() != 0) throw ParseError(Kind::kPayload, "rjip: trailing bytes");
    const auto residuals = range_decode(payload, mask.size(), table);
    const IsoKernel kernel(compute_sigma(mask.size(), w, h));
    AccumulationMaps maps(w, h);
    const auto levels = rjip_levels(mask.positions, residuals, q, kernel, maps);
    return normalize(maps, hole_fill(level_values(levels, Quantizer(q))));
  }

  const double lambda = from_fixed(in.u16(), kLambdaScale);
  const double sigma_scale = from_fixed(in.u16(), kSigmaScale);
  if (!(lambda > 0.0) || !(sigma_scale > 0.0)) {
    throw ParseError(Kind::kPayload, "rjip-a: non-positive parameter");
  }
  const auto payload = in.bytes(in.u32());
  if (in.remaining() != 0) throw ParseError(Kind::kPayload, "rjip-a: trailing bytes");
  const int fw = field_width(q);
  const auto levels = field_decode(payload, mask.size(), fw);
  for (int l : levels) {
    if (l >= q) throw ParseError(Kind::kPayload, "rjip-a: level out of range");
  }
  return rjip_a_reconstruct(w, h, r, q, levels, lambda, sigma_scale);
}

namespace {

struct Probe {
  EncodeResult result;
  bool feasible = false;
};

// Objective seen by the golden-section searches: the MSE for feasible probes,
// and a large value that shrinks towards the feasible set otherwise.
double penalised(const Probe& probe, double floor_ratio) {
  if (probe.feasible) return probe.result.mse;
  return 1e9 + (floor_ratio - probe.result.ratio());
}

}  // namespace

SearchResult search_params(const GrayImage& image, double target_ratio, RjipMode mode,
                           const RjipOptions& options) {
  if (!(target_ratio > 1.0)) throw InvalidArgument("search_params: target ratio must exceed 1");
  const double floor_ratio = target_ratio * (1.0 - kRatioTolerance);
  const int r_max = std::clamp(std::min(width(image), height(image)) / 2, 1, 255);

  // Anisotropic probes skip the parameter/tonal alternation; the leading
  // candidates are re-encoded in full afterwards.
  RjipOptions probe_options = options;
  if (mode == RjipMode::kAnisotropic) probe_options.alternations = 0;
  constexpr double kLambda0 = 8.0;
  constexpr double kScale0 = 1.0;

  std::map<std::pair<int, int>, Probe> probes;
  auto probe_at = [&](int r, int q) -> const Probe& {
    auto it = probes.find({r, q});
    if (it != probes.end()) return it->second;
    Probe p;
    p.result = mode == RjipMode::kIsotropic
                   ? rjip_encode_fixed(image, r, q, probe_options)
                   : rjip_a_encode_fixed(image, r, q, kLambda0, kScale0, probe_options);
    p.feasible = p.result.ratio() >= floor_ratio;
    return probes.emplace(std::pair{r, q}, std::move(p)).first->second;
  };

  auto best_over_q = [&](int r) {
    auto f = [&](double t) {
      const int q = std::clamp(static_cast<int>(std::lround(std::exp2(t))), 2, 256);
      return penalised(probe_at(r, q), floor_ratio);
    };
    return golden_section(f, 1.0, 8.0, options.golden_iterations).value;
  };
  auto by_r = [&](double x) {
    return best_over_q(std::clamp(static_cast<int>(std::lround(x)), 1, r_max));
  };
  golden_section(by_r, 1.0, static_cast<double>(r_max), options.golden_iterations);

  auto better = [&](const Probe& a, const Probe& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.feasible) return a.result.mse < b.result.mse;
    return a.result.ratio() > b.result.ratio();
  };

  std::vector<const Probe*> ranked;
  for (const auto& [key, p] : probes) ranked.push_back(&p);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](const Probe* a, const Probe* b) { return better(*a, *b); });

  SearchResult out;
  out.probes = static_cast<int>(probes.size());
  if (mode == RjipMode::kIsotropic || ranked.empty() || !ranked.front()->feasible) {
    const Probe& best = *ranked.front();
    out.best = best.result;
    out.feasible = best.feasible;
    out.params = best.result.params;
    return out;
  }

  // Tonal optimisation makes the level stream less compressible, so the full
  // encode at a light probe's (r, q) may fall short of the ratio. For the best
  // few grid spacings, bisect q with full encodes until the ratio holds.
  constexpr std::size_t kFinalSpacings = 2;
  std::vector<int> spacings;
  std::vector<int> start_q;
  for (const Probe* p : ranked) {
    if (!p->feasible || spacings.size() == kFinalSpacings) break;
    if (std::find(spacings.begin(), spacings.end(), p->result.params.r) != spacings.end()) continue;
    spacings.push_back(p->result.params.r);
    start_q.push_back(p->result.params.q);
  }
  const Probe* best = ranked.front();
  std::vector<Probe> finals;
  finals.reserve(kFinalSpacings * 8);
  for (std::size_t n = 0; n < spacings.size(); ++n) {
    int lo = 2, hi = start_q[n];
    while (lo <= hi) {
      const int q = (lo + hi + 1) / 2;
      Probe p;
      p.result = rjip_a_encode_fixed(image, spacings[n], q, kLambda0, kScale0, options);
      p.feasible = p.result.ratio() >= floor_ratio;
      ++out.probes;
      finals.push_back(std::move(p));
      if (finals.back().feasible) {
        if (better(finals.back(), *best)) best = &finals.back();
        lo = q + 1;
      } else {
        hi = q - 1;
      }
    }
  }
  out.best = best->result;
  out.feasible = best->feasible;
  out.params = best->result.params;
  return out;
}

}  // namespace shic
