// Copyright (c) the qpeg project authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// qpeg command-line front end. Output is line-oriented key=value pairs on
// stdout; diagnostics go to stderr. Exit codes: 0 success, 1 usage error,
// 2 malformed data or out-of-domain parameters.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qpeg/qpeg.hpp"

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::uint8_t> load_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qpeg::format_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void save_bytes(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw qpeg::format_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw qpeg::format_error("short write to " + path);
}

// Smallest n with branch^n == side; the side must be an exact power.
int infer_levels(int branch, int side) {
  std::int64_t s = 1;
  int n = 0;
  while (s < side) {
    s *= branch;
    ++n;
  }
  if (n < 1 || s != side)
    throw qpeg::domain_error("image side " + std::to_string(side) +
                             " is not a positive power of branch factor " + std::to_string(branch));
  return n;
}

struct CompressArgs {
  std::string input, output;
  int branch = 2;
  int levels = 4;
  bool levels_given = false;
  int chi = 4;
  int sweeps = 32;
  double tol = 1e-9;
  double quant = 0.0;
  bool no_dct = false;
  bool no_shift = false;
  bool lossless = false;
};

int run_compress(const CompressArgs& args) {
  const qpeg::ImageGrid image = qpeg::load_pgm(args.input);
  std::vector<std::uint8_t> bytes;
  if (args.lossless) {
    const int levels =
        args.levels_given ? args.levels : infer_levels(args.branch, image.width);
    bytes = qpeg::qzip_encode(image, args.branch, levels);
  } else {
    qpeg::QpegConfig config;
    config.branch = args.branch;
    config.levels = args.levels;
    config.chi_trunc = args.chi;
    config.use_dct = !args.no_dct;
    config.level_shift = !args.no_shift;
    config.quant_step = args.quant;
    config.als.max_sweeps = args.sweeps;
    config.als.rel_tol = args.tol;
    bytes = qpeg::qpeg_encode(image, config);
  }
  save_bytes(bytes, args.output);

  const qpeg::Container c = qpeg::parse_container(bytes);
  std::cout << "mode=" << (c.mode == qpeg::kModeQzip ? "qzip" : "qpeg") << "\n"
            << "width=" << c.width << "\n"
            << "height=" << c.height << "\n"
            << "box_side=" << c.box_side << "\n"
            << "boxes=" << c.boxes.size() << "\n"
            << "stored_bits=" << bytes.size() * 8 << "\n"
            << "bits_per_pixel="
            << fmt(static_cast<double>(bytes.size()) * 8 /
                   (static_cast<double>(c.width) * c.height))
            << "\n";
  return 0;
}

int run_decompress(const std::string& input, const std::string& output) {
  const std::vector<std::uint8_t> bytes = load_bytes(input);
  const qpeg::Container c = qpeg::parse_container(bytes);
  const qpeg::ImageGrid image = qpeg::decode(c);
  qpeg::save_pgm(image, output);
  std::cout << "mode=" << (c.mode == qpeg::kModeQzip ? "qzip" : "qpeg") << "\n"
            << "width=" << image.width << "\n"
            << "height=" << image.height << "\n";
  return 0;
}

int run_info(const std::string& input) {
  const std::vector<std::uint8_t> bytes = load_bytes(input);
  const qpeg::Container c = qpeg::parse_container(bytes);
  const int d = static_cast<int>(c.branch) * c.branch;
  std::cout << "mode=" << (c.mode == qpeg::kModeQzip ? "qzip" : "qpeg") << "\n"
            << "version=" << static_cast<int>(c.version) << "\n"
            << "branch=" << static_cast<int>(c.branch) << "\n"
            << "levels=" << static_cast<int>(c.levels) << "\n"
            << "width=" << c.width << "\n"
            << "height=" << c.height << "\n"
            << "box_side=" << c.box_side << "\n"
            << "box_rows=" << c.box_rows << "\n"
            << "box_cols=" << c.box_cols << "\n"
            << "boxes=" << c.boxes.size() << "\n"
            << "dct=" << ((c.flags & qpeg::kFlagDct) ? 1 : 0) << "\n"
            << "level_shift=" << ((c.flags & qpeg::kFlagLevelShift) ? 1 : 0) << "\n"
            << "quantized=" << ((c.flags & qpeg::kFlagQuantized) ? 1 : 0) << "\n"
            << "quant_step=" << fmt(c.quant_step) << "\n"
            << "payload_bytes=" << c.payload.size() << "\n"
            << "stored_bits=" << bytes.size() * 8 << "\n"
            << "bits_per_pixel="
            << fmt(static_cast<double>(bytes.size()) * 8 /
                   (static_cast<double>(c.width) * c.height))
            << "\n";

  std::int64_t total_actual = 0, total_uniform = 0;
  for (std::size_t box = 0; box < c.boxes.size(); ++box) {
    const std::vector<int> chi = c.bond_profile(box);
    std::int64_t actual = 0;
    int chi_max = 1;
    for (std::size_t a = 0; a + 1 < chi.size(); ++a) {
      actual += static_cast<std::int64_t>(chi[a]) * d * chi[a + 1];
      chi_max = std::max({chi_max, chi[a], chi[a + 1]});
    }
    const std::int64_t uniform =
        static_cast<std::int64_t>(c.levels) * d * chi_max * chi_max;
    total_actual += actual;
    total_uniform += uniform;

    std::cout << "box_" << box << "_scale=" << fmt(c.boxes[box].scale) << "\n";
    std::cout << "box_" << box << "_chi=";
    for (std::size_t a = 0; a < c.boxes[box].bonds.size(); ++a)
      std::cout << (a ? "," : "") << c.boxes[box].bonds[a];
    std::cout << "\n"
              << "box_" << box << "_params_actual=" << actual << "\n"
              << "box_" << box << "_params_uniform=" << uniform << "\n";
  }
  std::cout << "total_params_actual=" << total_actual << "\n"
            << "total_params_uniform=" << total_uniform << "\n";
  return 0;
}

int run_psnr(const std::string& a_path, const std::string& b_path) {
  const qpeg::ImageGrid a = qpeg::load_pgm(a_path);
  const qpeg::ImageGrid b = qpeg::load_pgm(b_path);
  const double mse = qpeg::mean_squared_error(a, b);
  const double psnr_db = qpeg::psnr(a, b);
  std::cout << "mse=" << fmt(mse) << "\n"
            << "psnr_db=" << fmt(psnr_db) << "\n";
  return 0;
}

int run_entropy(const std::string& input, int branch, int levels, bool levels_given) {
  const qpeg::ImageGrid image = qpeg::load_pgm(input);
  if (image.width != image.height)
    throw qpeg::domain_error("entropy: image must be square, got " +
                             std::to_string(image.width) + "x" + std::to_string(image.height));
  const int n = levels_given ? levels : infer_levels(branch, image.width);
  const qpeg::AddressScheme scheme(branch, n);
  const qpeg::Ket ket = qpeg::image_to_ket(image, scheme);
  const std::vector<double> entropies = qpeg::bond_entropies(ket);
  for (std::size_t cut = 0; cut < entropies.size(); ++cut)
    std::cout << "S_" << cut + 1 << "=" << fmt(entropies[cut]) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qpeg: tensor-network image codec for 8-bit grayscale PGM images"};
  app.require_subcommand(1);

  CompressArgs cargs;
  CLI::App* compress = app.add_subcommand("compress", "Encode a PGM image to a .qpg container");
  compress->add_option("input", cargs.input, "input PGM (binary P5)")
      ->required()
      ->check(CLI::ExistingFile);
  compress->add_option("output", cargs.output, "output .qpg path")->required();
  compress->add_option("--branch", cargs.branch, "branch factor b per axis")
      ->capture_default_str();
  CLI::Option* levels_opt =
      compress->add_option("--levels", cargs.levels, "coarse-graining levels n (box side b^n)")
          ->capture_default_str();
  compress->add_option("--chi", cargs.chi, "bond dimension cap")->capture_default_str();
  compress->add_option("--sweeps", cargs.sweeps, "maximum ALS sweeps")->capture_default_str();
  compress->add_option("--tol", cargs.tol, "ALS relative convergence tolerance")
      ->capture_default_str();
  compress->add_option("--quant", cargs.quant, "uniform quantizer step (0 = raw floats)")
      ->capture_default_str();
  compress->add_flag("--no-dct", cargs.no_dct, "skip the 2D DCT");
  compress->add_flag("--no-shift", cargs.no_shift, "skip the mid-gray level shift");
  compress->add_flag("--lossless", cargs.lossless,
                     "exact mode: single untransformed box, bit-exact round trip");

  std::string in_path, out_path, a_path, b_path;
  CLI::App* decompress = app.add_subcommand("decompress", "Decode a .qpg container to PGM");
  decompress->add_option("input", in_path, "input .qpg")->required()->check(CLI::ExistingFile);
  decompress->add_option("output", out_path, "output PGM path")->required();

  std::string info_path;
  CLI::App* info = app.add_subcommand("info", "Print container header and size statistics");
  info->add_option("input", info_path, "input .qpg")->required()->check(CLI::ExistingFile);

  CLI::App* psnr_cmd = app.add_subcommand("psnr", "Peak signal-to-noise ratio between two PGMs");
  psnr_cmd->add_option("reference", a_path, "reference PGM")->required()->check(CLI::ExistingFile);
  psnr_cmd->add_option("test", b_path, "test PGM")->required()->check(CLI::ExistingFile);

  std::string entropy_path;
  int entropy_branch = 2, entropy_levels = 0;
  CLI::App* entropy = app.add_subcommand("entropy", "Bond entanglement entropies of an image ket");
  entropy->add_option("input", entropy_path, "input PGM")->required()->check(CLI::ExistingFile);
  entropy->add_option("--branch", entropy_branch, "branch factor b per axis")
      ->capture_default_str();
  CLI::Option* entropy_levels_opt =
      entropy->add_option("--levels", entropy_levels, "levels n (default: inferred from side)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    cargs.levels_given = levels_opt->count() > 0;
    if (compress->parsed()) return run_compress(cargs);
    if (decompress->parsed()) return run_decompress(in_path, out_path);
    if (info->parsed()) return run_info(info_path);
    if (psnr_cmd->parsed()) return run_psnr(a_path, b_path);
    if (entropy->parsed())
      return run_entropy(entropy_path, entropy_branch, entropy_levels,
                         entropy_levels_opt->count() > 0);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
