#pragma once

// Command-line front end. Two subcommands:
//
//   chanvese segment INPUT [options]   run a segmentation, write artifacts
//   chanvese synth disk|thin [options] write a synthetic fixture
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 numerical blowup,
// 4 output error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "chanvese/errors.hpp"
#include "chanvese/image_io.hpp"
#include "chanvese/imaging.hpp"
#include "chanvese/params.hpp"
#include "chanvese/segment.hpp"

namespace chanvese::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitNumerical = 3,
  kExitOutput = 4,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { segment, synth };
enum class SynthKind { disk, thin };
enum class InitKind { circle, rect, checker };

struct SegmentOptions {
  std::string input;
  std::string out_dir = ".";
  Params params;
  /// Unset means the default centred circle for the (cropped) image size.
  std::optional<InitSpec> init;
  std::optional<RoiRect> roi;
  std::uint64_t seed = 0;
};

struct SynthOptions {
  SynthKind kind = SynthKind::disk;
  std::string out;
  std::string mask_out;  ///< empty: no ground-truth file
  int width = 128;
  int height = 128;
  std::optional<double> cx;  ///< disk centre; unset means the image centre
  std::optional<double> cy;
  double radius = 30.0;
  int thickness = 2;
  double fg = 1.0;
  double bg = 0.0;
  double blur = 0.0;
  double noise = 0.0;
  std::uint64_t seed = 42;
};

struct CliConfig {
  Command command = Command::segment;
  SegmentOptions segment;
  SynthOptions synth;
  int verbosity = 1;  ///< 0 quiet, 1 summary, 2 per-iteration trace on stderr
  /// Set when --help was requested; holds the text and nothing else runs.
  std::optional<std::string> help;
};

namespace detail {

inline std::vector<double> parse_numbers(const std::string& text, std::size_t count,
                                         const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw UsageError(std::string(flag) + ": malformed number '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.size() != count || (!text.empty() && text.back() == ',')) {
    throw UsageError(std::string(flag) + ": expected " + std::to_string(count) +
                     " comma-separated numbers, got '" + text + "'");
  }
  return out;
}

inline int as_int(double v, const char* flag) {
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw UsageError(std::string(flag) + ": expected integers");
  }
  return static_cast<int>(v);
}

inline std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

/// One CSV row per trace record, values printed with 12 significant digits.
inline std::string trace_csv(const std::vector<TraceRecord>& trace) {
  std::string out = "iter,c1,c2,length,area_inside,energy,q,m\n";
  for (const TraceRecord& r : trace) {
    out += std::to_string(r.iter);
    for (double v : {r.c1, r.c2, r.length, r.area_inside, r.energy, r.q}) {
      out += ',';
      out += detail::format_g12(v);
    }
    out += ',' + std::to_string(r.m) + '\n';
  }
  return out;
}

/// Parses argv into a validated configuration. Throws UsageError on unknown
/// flags, malformed values, conflicting init flags or invalid parameters.
inline CliConfig parse_args(int argc, const char* const* argv) {
  CliConfig cfg;
  CLI::App app{"Two-phase level-set image segmentation", "chanvese"};
  app.require_subcommand(1);
  bool quiet = false, verbose = false;
  app.add_flag("-q,--quiet", quiet, "Print nothing on success");
  app.add_flag("-v,--verbose", verbose, "Print the per-iteration trace to stderr");

  SegmentOptions& so = cfg.segment;
  Params& pr = so.params;
  CLI::App* seg = app.add_subcommand("segment", "Segment a PNG or binary PGM image");
  seg->add_option("input", so.input, "Input image")->required();
  seg->add_option("--out", so.out_dir, "Output directory (created if missing)");
  seg->add_option("--mu", pr.mu, "Length penalty")->capture_default_str();
  seg->add_option("--nu", pr.nu, "Area penalty")->capture_default_str();
  seg->add_option("--lambda1", pr.lambda1, "Inside fidelity weight")->capture_default_str();
  seg->add_option("--lambda2", pr.lambda2, "Outside fidelity weight")->capture_default_str();
  seg->add_option("--p", pr.p, "Exponent on the curve length")->capture_default_str();
  seg->add_option("--eps", pr.eps, "Heaviside regularization width")->capture_default_str();
  seg->add_option("--dt", pr.dt, "Time step (default 0.5 h^2/mu, at most 5)");
  seg->add_option("--dtau", pr.dtau, "Reinitialization step (default 0.5 h)");
  seg->add_option("--max-iters", pr.max_iters, "Iteration cap")->capture_default_str();
  seg->add_option("--reinit-every", pr.reinit_every, "Reinitialize every N iterations")
      ->capture_default_str();
  seg->add_option("--reinit-steps", pr.reinit_steps, "Reinitialization sweeps")
      ->capture_default_str();
  std::string scheme = "subcell";
  seg->add_option("--reinit-scheme", scheme, "Reinitialization scheme")
      ->check(CLI::IsMember({"upwind", "subcell"}))
      ->capture_default_str();
  std::string init_kind;
  seg->add_option("--init", init_kind, "Initial contour shape")
      ->check(CLI::IsMember({"circle", "rect", "checker"}));
  std::string circle, rect, roi;
  double checker = 0.0;
  auto* circle_opt = seg->add_option("--circle", circle, "Circle init CX,CY,R");
  auto* rect_opt = seg->add_option("--rect", rect, "Rectangle init X0,Y0,X1,Y1");
  auto* checker_opt = seg->add_option("--checker", checker, "Checkerboard init period");
  seg->add_option("--roi", roi, "Segment only the rectangle X,Y,W,H");
  seg->add_option("--seed", so.seed, "Recorded in the summary; segmentation is deterministic");

  SynthOptions& sy = cfg.synth;
  CLI::App* syn = app.add_subcommand("synth", "Write a synthetic test image");
  std::string kind;
  syn->add_option("kind", kind, "Fixture type")
      ->required()
      ->check(CLI::IsMember({"disk", "thin"}));
  syn->add_option("--out", sy.out, "Image path (.png or .pgm, 16-bit)")->required();
  syn->add_option("--mask", sy.mask_out, "Ground-truth mask path");
  syn->add_option("--width", sy.width)->capture_default_str();
  syn->add_option("--height", sy.height)->capture_default_str();
  syn->add_option("--cx", sy.cx, "Disk centre x (default image centre)");
  syn->add_option("--cy", sy.cy, "Disk centre y (default image centre)");
  syn->add_option("--radius", sy.radius, "Disk radius")->capture_default_str();
  syn->add_option("--thickness", sy.thickness, "Bar thickness")->capture_default_str();
  syn->add_option("--fg", sy.fg)->capture_default_str();
  syn->add_option("--bg", sy.bg)->capture_default_str();
  syn->add_option("--blur", sy.blur, "Gaussian blur sigma, 0 for none")->capture_default_str();
  syn->add_option("--noise", sy.noise, "Gaussian noise stddev")->capture_default_str();
  syn->add_option("--seed", sy.seed, "Noise seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    cfg.help = app.help();
    return cfg;
  } catch (const CLI::CallForAllHelp&) {
    cfg.help = app.help("", CLI::AppFormatMode::All);
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  cfg.verbosity = quiet ? 0 : (verbose ? 2 : 1);
  if (quiet && verbose) throw UsageError("--quiet and --verbose are mutually exclusive");

  if (syn->parsed()) {
    cfg.command = Command::synth;
    sy.kind = kind == "disk" ? SynthKind::disk : SynthKind::thin;
    if (sy.width < kMinGridExtent || sy.height < kMinGridExtent) {
      throw UsageError("synth: width and height must be >= 3");
    }
    if (!(sy.blur >= 0.0)) throw UsageError("synth: --blur must be >= 0");
    if (!(sy.noise >= 0.0)) throw UsageError("synth: --noise must be >= 0");
    if (sy.kind == SynthKind::disk && !(sy.radius > 0.0)) {
      throw UsageError("synth: --radius must be > 0");
    }
    if (sy.kind == SynthKind::thin &&
        (sy.thickness < 1 || sy.thickness > std::min(sy.width, sy.height))) {
      throw UsageError("synth: --thickness must lie in [1, min(width, height)]");
    }
    return cfg;
  }

  cfg.command = Command::segment;
  pr.reinit_subcell_fix = scheme == "subcell";
  try {
    pr.validate();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }

  const int shape_flags = static_cast<int>(circle_opt->count() > 0) +
                          static_cast<int>(rect_opt->count() > 0) +
                          static_cast<int>(checker_opt->count() > 0);
  if (shape_flags > 1) throw UsageError("only one of --circle, --rect, --checker may be given");
  InitKind ik = InitKind::circle;
  if (!init_kind.empty()) {
    ik = init_kind == "circle" ? InitKind::circle
                               : (init_kind == "rect" ? InitKind::rect : InitKind::checker);
    if ((circle_opt->count() && ik != InitKind::circle) ||
        (rect_opt->count() && ik != InitKind::rect) ||
        (checker_opt->count() && ik != InitKind::checker)) {
      throw UsageError("--init " + init_kind + " conflicts with the given shape flag");
    }
  } else if (rect_opt->count()) {
    ik = InitKind::rect;
  } else if (checker_opt->count()) {
    ik = InitKind::checker;
  }
  if (circle_opt->count()) {
    const auto v = detail::parse_numbers(circle, 3, "--circle");
    if (!(v[2] > 0.0)) throw UsageError("--circle: radius must be > 0");
    so.init = CircleInit{v[0], v[1], v[2]};
  } else if (ik == InitKind::rect) {
    if (!rect_opt->count()) throw UsageError("--init rect requires --rect X0,Y0,X1,Y1");
    const auto v = detail::parse_numbers(rect, 4, "--rect");
    if (v[0] == v[2] || v[1] == v[3]) throw UsageError("--rect: rectangle is degenerate");
    so.init = RectangleInit{v[0], v[1], v[2], v[3]};
  } else if (ik == InitKind::checker) {
    const double period = checker_opt->count() ? checker : CheckerboardInit{}.period;
    if (!(period >= 2.0)) throw UsageError("--checker: period must be >= 2");
    so.init = CheckerboardInit{period};
  }
  if (!roi.empty()) {
    const auto v = detail::parse_numbers(roi, 4, "--roi");
    so.roi = RoiRect{detail::as_int(v[0], "--roi"), detail::as_int(v[1], "--roi"),
                     detail::as_int(v[2], "--roi"), detail::as_int(v[3], "--roi")};
    if (so.roi->width < kMinGridExtent || so.roi->height < kMinGridExtent) {
      throw UsageError("--roi: width and height must be >= 3");
    }
  }
  return cfg;
}

namespace detail {

/// Files written under temporary names and renamed into place by commit();
/// anything not committed is removed on destruction.
class StagedOutputs {
 public:
  explicit StagedOutputs(std::filesystem::path dir) : dir_(std::move(dir)) {}
  StagedOutputs(const StagedOutputs&) = delete;
  StagedOutputs& operator=(const StagedOutputs&) = delete;
  ~StagedOutputs() {
    std::error_code ec;
    for (const auto& [tmp, final_path] : files_) std::filesystem::remove(tmp, ec);
  }

  /// Temporary path to write `name` to. Keeps the extension so format
  /// selection by suffix still works.
  std::string stage(const std::string& name) {
    const std::filesystem::path final_path = dir_ / name;
    std::filesystem::path tmp = dir_ / (".tmp-" + name);
    files_.emplace_back(tmp, final_path);
    return tmp.string();
  }

  void commit() {
    for (const auto& [tmp, final_path] : files_) {
      std::error_code ec;
      std::filesystem::rename(tmp, final_path, ec);
      if (ec) throw OutputError(final_path.string() + ": cannot rename into place: " + ec.message());
    }
    files_.clear();
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> files_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError(path + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw OutputError(path + ": write failed");
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw OutputError(dir.string() + ": cannot create output directory");
  }
}

inline int run_segment(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const SegmentOptions& so = cfg.segment;
  ScalarField image = load_grayscale(so.input);
  if (so.roi) {
    if (!roi_fits(*so.roi, image.width(), image.height())) {
      const RoiRect& r = *so.roi;
      throw InputError("--roi " + std::to_string(r.x0) + "," + std::to_string(r.y0) + "," +
                       std::to_string(r.width) + "," + std::to_string(r.height) +
                       " exceeds the " + std::to_string(image.width()) + "x" +
                       std::to_string(image.height()) + " image bounds");
    }
    image = crop_roi(image, *so.roi);
  }
  const InitSpec init = so.init.value_or(default_init(image.width(), image.height()));
  LevelSetField phi0;
  try {
    phi0 = init_phi(image.width(), image.height(), so.params.h, init);
  } catch (const ParameterError& e) {
    throw InputError(std::string("initial contour does not fit the image: ") + e.what());
  }
  const SegmentationResult result = segment(image, so.params, std::move(phi0));

  const std::filesystem::path dir(so.out_dir);
  ensure_directory(dir);
  StagedOutputs staged(dir);
  save_mask(result.mask, staged.stage("mask.png"));
  save_overlay(image, result.contour, staged.stage("overlay.png"));
  save_phi_pgm(result.phi, staged.stage("phi_final.pgm"));
  const std::string csv = trace_csv(result.trace);
  write_text(staged.stage("trace.csv"), csv);
  staged.commit();

  if (cfg.verbosity >= 2) err << csv;
  if (cfg.verbosity >= 1) {
    const double energy =
        result.trace.empty() ? result.initial_energy : result.trace.back().energy;
    out << "iterations: " << result.iterations_used << '\n'
        << "converged: " << (result.converged ? "yes" : "no") << '\n'
        << "final_energy: " << format_g12(energy) << '\n'
        << "seed: " << so.seed << '\n'
        << "output: " << dir.string() << '\n';
  }
  return kExitOk;
}

inline int run_synth(const CliConfig& cfg, std::ostream& out) {
  const SynthOptions& sy = cfg.synth;
  SyntheticImage s =
      sy.kind == SynthKind::disk
          ? synth_disk(sy.width, sy.height, sy.cx.value_or((sy.width - 1) / 2.0),
                       sy.cy.value_or((sy.height - 1) / 2.0), sy.radius, sy.fg, sy.bg)
          : synth_thin_edges(sy.width, sy.height, sy.thickness, sy.fg, sy.bg);
  if (sy.blur > 0.0) s.image = gaussian_blur(s.image, sy.blur);
  if (sy.noise > 0.0) s.image = add_noise(s.image, sy.noise, sy.seed);

  const std::filesystem::path img_path(sy.out);
  if (img_path.has_parent_path()) ensure_directory(img_path.parent_path());
  // Stage next to the destination so the rename stays on one filesystem.
  StagedOutputs staged(img_path.has_parent_path() ? img_path.parent_path() : ".");
  save_grayscale16(s.image, staged.stage(img_path.filename().string()));
  std::unique_ptr<StagedOutputs> mask_stage;
  if (!sy.mask_out.empty()) {
    const std::filesystem::path mask_path(sy.mask_out);
    if (mask_path.has_parent_path()) ensure_directory(mask_path.parent_path());
    mask_stage = std::make_unique<StagedOutputs>(mask_path.has_parent_path() ? mask_path.parent_path()
                                                                             : ".");
    save_mask(s.truth, mask_stage->stage(mask_path.filename().string()));
  }
  staged.commit();
  if (mask_stage) mask_stage->commit();
  if (cfg.verbosity >= 1) out << "wrote " << sy.out << '\n';
  return kExitOk;
}

}  // namespace detail

/// Executes a parsed configuration and maps failures to exit codes; error
/// messages go to `err`.
inline int run(const CliConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  if (cfg.help) {
    out << *cfg.help;
    return kExitOk;
  }
  try {
    return cfg.command == Command::synth ? detail::run_synth(cfg, out)
                                         : detail::run_segment(cfg, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitOutput;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

/// parse_args + run with usage errors reported as exit code 1.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout,
                std::ostream& err = std::cerr) {
  CliConfig cfg;
  try {
    cfg = parse_args(argc, argv);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }
  return run(cfg, out, err);
}

}  // namespace chanvese::cli
