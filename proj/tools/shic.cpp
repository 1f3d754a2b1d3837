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

// Command-line front end: encode, decode, inpaint, rd, disk-bench, scale-bench.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "shic/anisotropic.hpp"
#include "shic/container.hpp"
#include "shic/eval.hpp"
#include "shic/homdiff.hpp"
#include "shic/mask.hpp"
#include "shic/shepard.hpp"

namespace {

using namespace shic;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInfeasible = 3 };

struct UsageError : Error {
  using Error::Error;
};

struct EncodeArgs {
  std::string input, output, codec = "rjip";
  double ratio = 0.0, split_error = 0.0;
  std::uint64_t seed = 1;
};

struct InpaintArgs {
  std::string input, output, mode = "iso";
  int grid = 4;
  double lambda = 8.0;
};

struct RdArgs {
  std::string input, output, codec = "rjip", ratios = "20,40,80,160";
  std::uint64_t seed = 1;
  bool timings = false;
};

struct ScaleArgs {
  std::string input, output;
  int levels = 5;
  std::uint64_t seed = 1;
  bool timings = false;
};

Codec codec_or_throw(const std::string& name) {
  const auto c = parse_codec(name);
  if (!c) throw UsageError("unknown codec '" + name + "'");
  return *c;
}

std::vector<double> parse_ratios(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !(v > 0.0)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("bad ratio '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("no ratios given");
  std::sort(out.begin(), out.end());
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

int run_encode(const EncodeArgs& a) {
  const Codec codec = codec_or_throw(a.codec);
  const bool by_ratio = a.ratio > 0.0;
  if (by_ratio == (a.split_error > 0.0)) {
    throw UsageError("give exactly one of --ratio and --split-error");
  }
  const bool tree = codec == Codec::kTreeIso || codec == Codec::kTreeAniso;
  if (!by_ratio && !tree) throw UsageError("--split-error applies to the tree codecs only");

  const GrayImage image = read_pgm_file(a.input);
  EncodeSettings settings;
  settings.rjip.seed = a.seed;
  settings.tree.seed = a.seed;
  CodecRun run;
  if (by_ratio) {
    run = encode_for_ratio(image, codec, a.ratio, settings);
  } else {
    const auto mode = codec == Codec::kTreeIso ? TreeMode::kIsotropic : TreeMode::kAnisotropic;
    run.file = subdivide_encode(image, a.split_error, mode, settings.tree).file;
    run.feasible = true;
  }
  write_file(a.output, run.file);
  const GrayImage decoded = decode_any(run.file);
  std::printf("codec=%s bytes=%zu ratio=%.4f mse=%.4f\n", codec_label(codec), run.file.size(),
              static_cast<double>(image.size()) / static_cast<double>(run.file.size()),
              mse(decoded, image));
  if (!run.feasible) {
    std::fprintf(stderr, "shic: target ratio %.3g not reached; wrote the closest encoding\n",
                 a.ratio);
    return kInfeasible;
  }
  return kOk;
}

int run_decode(const std::string& input, const std::string& output) {
  write_pgm_file(output, decode_any(read_file(input)));
  return kOk;
}

int run_inpaint(const InpaintArgs& a) {
  const GrayImage image = read_pgm_file(a.input);
  MaskedData mask = make_regular_mask(width(image), height(image), a.grid);
  sample_values(mask, image);
  GrayImage out;
  if (a.mode == "iso") {
    out = inpaint_iso(mask);
  } else if (a.mode == "aniso") {
    const std::vector<double> sigmas(mask.size(),
                                     compute_sigma(mask.size(), width(image), height(image)));
    out = inpaint_aniso(mask.positions, as_span(mask.values), sigmas, a.lambda, width(image),
                        height(image));
  } else if (a.mode == "hom") {
    out = inpaint_hom(mask.positions, as_span(mask.values), width(image), height(image)).image;
  } else {
    throw UsageError("unknown mode '" + a.mode + "'");
  }
  write_pgm_file(a.output, out);
  std::printf("mode=%s points=%zu mse=%.4f\n", a.mode.c_str(), mask.size(),
              mse(quantize_to_8bit(out), image));
  return kOk;
}

int run_rd(const RdArgs& a) {
  const Codec codec = codec_or_throw(a.codec);
  const auto targets = parse_ratios(a.ratios);
  const GrayImage image = read_pgm_file(a.input);
  EncodeSettings settings;
  settings.rjip.seed = a.seed;
  settings.tree.seed = a.seed;
  const auto points = rd_sweep(image, codec, targets, settings);
  write_text(a.output, rd_csv(points, a.timings));
  return kOk;
}

int run_disk(std::uint64_t seed, int hom_sweeps, bool timings) {
  DiskOptions options;
  options.seed = seed;
  options.aniso.seed = seed;
  options.hom_sweeps = hom_sweeps;
  const DiskReport r = disk_experiment(options);
  std::printf("iso    mse %.4f (before tonal %.4f)\n", r.iso_mse, r.iso_mse_initial);
  std::printf("hom    mse %.4f (before tonal %.4f, trial)\n", r.hom_mse, r.hom_mse_initial);
  std::printf("hom    mse %.4f (least squares, %d iterations)\n", r.hom_ls_mse,
              r.hom_ls_iterations);
  std::printf("aniso  mse %.4f (lambda %.4f, sigma scale %.4f)\n", r.aniso_mse, r.aniso_lambda,
              r.aniso_sigma_scale);
  if (timings) {
    std::printf("seconds iso %.2f hom %.2f hom-ls %.2f aniso %.2f\n", r.iso_s, r.hom_s,
                r.hom_ls_s, r.aniso_s);
  }
  return kOk;
}

int run_scale(const ScaleArgs& a) {
  const GrayImage image = read_pgm_file(a.input);
  ScaleOptions options;
  options.seed = a.seed;
  const ScalingReport report = scaling_study(image, a.levels, options);
  write_text(a.output, scaling_csv(report, a.timings));
  std::fprintf(stderr, "rjip op-count slope %.4f\n", report.rjip_op_slope);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greyscale image compression with Shepard inpainting", "shic"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Compress a PGM image");
  encode->add_option("-i,--input", enc.input, "Input PGM")->required();
  encode->add_option("-o,--output", enc.output, "Output .shic file")->required();
  encode->add_option("--codec", enc.codec, "rjip, rjip-a, tree-iso or tree-aniso");
  auto* ratio_opt = encode->add_option("--ratio", enc.ratio, "Target compression ratio");
  auto* split_opt =
      encode->add_option("--split-error", enc.split_error, "Tree split threshold (squared error per leaf)");
  ratio_opt->excludes(split_opt);
  encode->add_option("--seed", enc.seed, "Seed for the tonal visiting order");

  std::string dec_in, dec_out;
  auto* decode = app.add_subcommand("decode", "Decompress a .shic file");
  decode->add_option("-i,--input", dec_in, "Input .shic file")->required();
  decode->add_option("-o,--output", dec_out, "Output PGM")->required();

  InpaintArgs inp;
  auto* inpaint = app.add_subcommand("inpaint", "Reconstruct from a regular grid of pixels");
  inpaint->add_option("-i,--input", inp.input, "Input PGM")->required();
  inpaint->add_option("-o,--output", inp.output, "Output PGM")->required();
  inpaint->add_option("--mask-grid", inp.grid, "Grid spacing r");
  inpaint->add_option("--mode", inp.mode, "iso, aniso or hom");
  inpaint->add_option("--lambda", inp.lambda, "Contrast parameter for aniso");

  RdArgs rd;
  auto* rdcmd = app.add_subcommand("rd", "Rate-distortion sweep to CSV");
  rdcmd->add_option("-i,--input", rd.input, "Input PGM")->required();
  rdcmd->add_option("-o,--output", rd.output, "Output CSV (- for stdout)");
  rdcmd->add_option("--codec", rd.codec, "rjip, rjip-a, tree-iso or tree-aniso");
  rdcmd->add_option("--ratios", rd.ratios, "Comma-separated target ratios");
  rdcmd->add_option("--seed", rd.seed, "Seed for the tonal visiting order");
  rdcmd->add_flag("--timings", rd.timings, "Write wall-clock columns instead of zeros");

  std::uint64_t disk_seed = 1;
  int disk_sweeps = 3;
  bool disk_timings = false;
  auto* disk = app.add_subcommand("disk-bench", "Disk experiment: iso, hom and aniso");
  disk->add_option("--seed", disk_seed, "Seed for the tonal visiting order");
  disk->add_option("--hom-sweeps", disk_sweeps, "Tonal sweeps for the diffusion baseline");
  disk->add_flag("--timings", disk_timings, "Print wall-clock seconds");

  ScaleArgs sc;
  auto* scale = app.add_subcommand("scale-bench", "Runtime scaling over downsampled copies");
  scale->add_option("-i,--input", sc.input, "Input PGM")->required();
  scale->add_option("-o,--output", sc.output, "Output CSV (- for stdout)");
  scale->add_option("--levels", sc.levels, "Number of scales");
  scale->add_option("--seed", sc.seed, "Seed for the tonal visiting order");
  scale->add_flag("--timings", sc.timings, "Write wall-clock columns instead of zeros");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "shic: %s\n", e.what());
    return kUsage;
  }

  try {
    if (*encode) return run_encode(enc);
    if (*decode) return run_decode(dec_in, dec_out);
    if (*inpaint) return run_inpaint(inp);
    if (*rdcmd) return run_rd(rd);
    if (*disk) return run_disk(disk_seed, disk_sweeps, disk_timings);
    if (*scale) return run_scale(sc);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "shic: %s\n", e.what());
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "shic: %s\n", e.what());
    return kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "shic: %s\n", e.what());
    return kData;
  }
  return kUsage;
}
