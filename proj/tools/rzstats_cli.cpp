// rzstats: command-line front end for the zero-spacing pipeline.
//
//   rzstats primes  --prime-cutoff P
//   rzstats const   --prime-cutoff P
//   rzstats eval    --which f --prime-cutoff P --from 0 --to 100 --step 0.01
//   rzstats hist    --zeros PATH [--n-zeros N] [--bin-width D] [--x-max X]
//   rzstats fft     (--zeros PATH | --input series.csv) [--peaks PATH]
//   rzstats fit     --zeros PATH --prime-cutoff P [--variant V] [--method M]
//   rzstats correct --zeros PATH --prime-cutoff P [--amplitude A]
//   rzstats report  --zeros PATH --prime-cutoff P
//
// Results go to --out (or stdout); progress and errors go to stderr.

#include <rzstats/json.hpp>
#include <rzstats/rzstats.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace rzstats;
using Clock = std::chrono::steady_clock;

struct Options {
  std::string zeros;
  std::string format = "binary";
  double bin_width = kDefaultBinWidth;
  double x_max = kDefaultXMax;
  std::uint64_t prime_cutoff = 4090441;
  std::string variant = "f-prime";
  std::string method = "spectral";
  std::optional<std::size_t> n_zeros;
  std::string out;
  unsigned threads = detail::default_threads();
  std::string config;

  // eval
  std::string which = "f";
  double from = 0.0;
  double to = 100.0;
  double step = 0.01;

  // fft
  std::string input;
  std::string peaks;
  double f_max = 5.0;
  bool raw = false;

  // correct
  std::optional<double> amplitude;
};

// Rate-limited progress lines on stderr.
class Progress {
 public:
  explicit Progress(std::string label, double total) : label_(std::move(label)), total_(total) {}

  void operator()(double done) {
    const auto now = Clock::now();
    if (now - last_ < std::chrono::seconds(1)) return;
    last_ = now;
    std::fprintf(stderr, "progress %s: %.1f%%\n", label_.c_str(),
                 total_ > 0 ? 100.0 * done / total_ : 0.0);
  }

  std::function<void(std::uint64_t)> sieve_callback() {
    return [this](std::uint64_t high) { (*this)(static_cast<double>(high)); };
  }

 private:
  std::string label_;
  double total_;
  Clock::time_point last_ = Clock::now();
};

// Lines `key = value`; `#` starts a comment. Returns flags in argv form.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config " + path);
  std::vector<std::string> args;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = std::string(detail::trim(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::parse_error,
                  path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(detail::trim(std::string_view(body).substr(0, eq)));
    const std::string value(detail::trim(std::string_view(body).substr(eq + 1)));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key.empty() || key == "config") {
      throw Error(ErrorCode::parse_error, path + ":" + std::to_string(line_no) + ": bad key");
    }
    args.push_back("--" + key);
    args.push_back(value);
  }
  return args;
}

// The config path has to be known before the real parse so that its
// settings can be placed ahead of the command-line flags, which then win.
std::optional<std::string> find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) file_ = open_output(path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::optional<std::ofstream> file_;
};

FunctionKind variant_of(const Options& o) {
  const auto v = parse_function_kind(o.variant);
  if (!v) throw Error(ErrorCode::validation_error, "unknown variant '" + o.variant + "'");
  check_variant(*v);
  return *v;
}

FitMethod method_of(const Options& o) {
  const auto m = parse_fit_method(o.method);
  if (!m) throw Error(ErrorCode::validation_error, "unknown method '" + o.method + "'");
  return *m;
}

void validate_geometry(const Options& o) {
  if (!(o.bin_width > 0.0) || !(o.x_max > 0.0)) {
    throw Error(ErrorCode::validation_error, "--bin-width and --x-max must be positive");
  }
  if (o.threads < 1) throw Error(ErrorCode::validation_error, "--threads must be >= 1");
}

PrimeTable load_primes(const Options& o) {
  Progress progress("sieve", static_cast<double>(o.prime_cutoff));
  return sieve_primes(o.prime_cutoff, progress.sieve_callback());
}

ZeroTable load_table(const Options& o) {
  if (o.zeros.empty()) throw Error(ErrorCode::validation_error, "--zeros is required");
  auto zt = load_zeros(o.zeros, o.format);
  if (o.n_zeros) zt = take_first(zt, *o.n_zeros);
  return zt;
}

Histogram histogram_for(const Options& o, const ZeroTable& zt) {
  validate_geometry(o);
  return build_histogram(zt, o.bin_width, o.x_max, o.threads);
}

nlohmann::json zeros_summary(const ZeroTable& zt) {
  return {{"source", zt.source()},
          {"count", zt.count()},
          {"digest", digest(zt.ordinates())}};
}

int cmd_primes(const Options& o) {
  const auto pt = load_primes(o);
  Output out(o.out);
  out.stream() << nlohmann::json{{"limit", o.prime_cutoff}, {"count", pt.size()},
                                 {"last", pt.last()}}
                      .dump()
               << '\n';
  return 0;
}

int cmd_const(const Options& o) {
  Progress progress("const", static_cast<double>(o.prime_cutoff));
  const double c = const_C_streaming(o.prime_cutoff, progress.sieve_callback());
  Output out(o.out);
  out.stream() << format_double(c) << '\n';
  return 0;
}

int cmd_eval(const Options& o) {
  const auto kind = parse_function_kind(o.which);
  if (!kind) throw Error(ErrorCode::validation_error, "unknown function '" + o.which + "'");
  const auto xs = make_grid(o.from, o.to, o.step);
  if (*kind == FunctionKind::cin) {
    std::vector<double> values(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) values[k] = cin(xs[k]);
    Output out(o.out);
    write_two_columns(out.stream(), "x,value", xs, values);
    return 0;
  }
  const auto pt = load_primes(o);
  const auto s = sample_function(pt, *kind, xs, o.threads);
  Output out(o.out);
  write_sample_csv(out.stream(), s);
  return 0;
}

int cmd_hist(const Options& o) {
  const auto zt = load_table(o);
  const auto h = histogram_for(o, zt);
  Output out(o.out);
  write_histogram_csv(out.stream(), h);
  std::cerr << histogram_summary(h).dump() << '\n';
  return 0;
}

// Two-column CSV with a header line; the first column must be a uniform grid.
std::pair<std::vector<double>, double> read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
  std::vector<double> xs, ys;
  std::string line;
  std::getline(in, line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::istringstream row(line);
    double x = 0.0, y = 0.0;
    char comma = 0;
    if (!(row >> x >> comma >> y) || comma != ',') {
      throw Error(ErrorCode::parse_error, path + ":" + std::to_string(line_no) + ": bad row");
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  if (xs.size() < 2) throw Error(ErrorCode::validation_error, path + ": need at least 2 rows");
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (std::fabs(xs[k] - xs[k - 1] - dx) > 1e-6 * dx) {
      throw Error(ErrorCode::validation_error, path + ": first column is not a uniform grid");
    }
  }
  return {ys, dx};
}

// Measured lines at the predicted n ln p for the small primes p <= 20.
nlohmann::json peak_table(const Spectrum& sp, double f_max) {
  const double top = std::min(f_max, 0.999 * sp.nyquist());
  const auto pt = sieve_primes(kFitPrimeBound);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& pred : predict_peaks(pt, top)) {
    if (nearest_bin(sp, pred.freq) + 2 > sp.nyquist_index()) continue;
    auto row = to_json(find_peak(sp, pred.freq));
    row["p"] = pred.p;
    row["n"] = pred.n;
    row["predicted_freq"] = pred.freq;
    row["rel_amplitude"] = pred.rel_amplitude;
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_fft(const Options& o) {
  std::vector<double> series;
  double dx = o.bin_width;
  if (!o.input.empty()) {
    std::tie(series, dx) = read_series_csv(o.input);
  } else {
    series = histogram_for(o, load_table(o)).counts_as_double();
  }
  const auto sp = dft(series, dx, !o.raw);
  Output out(o.out);
  write_spectrum_csv(out.stream(), sp);
  if (!o.peaks.empty()) {
    auto file = open_output(o.peaks);
    file << nlohmann::json{{"tool_version", kToolVersion},
                           {"length", sp.size()},
                           {"freq_step", sp.freq_step},
                           {"normalized", sp.normalized},
                           {"peaks", peak_table(sp, o.f_max)}}
                .dump(2)
         << '\n';
  }
  return 0;
}

struct FitRun {
  ZeroTable zeros;
  Histogram hist;
  PrimeTable primes;
  std::vector<double> sample;
  CorrectionFit fit;
};

FitRun run_fit(const Options& o) {
  const auto variant = variant_of(o);
  const auto method = method_of(o);
  auto zt = load_table(o);
  auto h = histogram_for(o, zt);
  auto pt = load_primes(o);
  auto sample = sample_correction(pt, h, variant, o.threads);
  auto fit = fit_amplitude(h, pt, variant, method, sample);
  return {std::move(zt), std::move(h), std::move(pt), std::move(sample), std::move(fit)};
}

nlohmann::json fit_document(const FitRun& r) {
  auto j = to_json(r.fit);
  j["tool_version"] = kToolVersion;
  j["zeros"] = zeros_summary(r.zeros);
  j["histogram"] = histogram_summary(r.hist);
  j["sample_digest"] = digest(std::span<const double>(r.sample));
  return j;
}

int cmd_fit(const Options& o) {
  const auto r = run_fit(o);
  Output out(o.out);
  out.stream() << fit_document(r).dump(2) << '\n';
  return 0;
}

int cmd_correct(const Options& o) {
  std::vector<double> corrected, centers;
  if (o.amplitude) {
    const auto variant = variant_of(o);
    const auto h = histogram_for(o, load_table(o));
    const auto pt = load_primes(o);
    const auto sample = sample_correction(pt, h, variant, o.threads);
    corrected = apply_correction(h, *o.amplitude, sample);
    centers = h.bin_centers();
  } else {
    const auto r = run_fit(o);
    corrected = apply_correction(r.hist, r.fit, r.sample);
    centers = r.hist.bin_centers();
    std::cerr << "amplitude " << format_double(r.fit.amplitude) << '\n';
  }
  Output out(o.out);
  write_two_columns(out.stream(), "bin_center,value", centers, corrected);
  return 0;
}

int cmd_report(const Options& o) {
  const auto r = run_fit(o);
  const auto before = dft(r.hist.counts_as_double(), r.hist.bin_width, true);
  const auto after =
      dft(apply_correction(r.hist, r.fit, r.sample), r.hist.bin_width, true);
  const double f_max = std::min(r.fit.flatness_hi, 0.999 * before.nyquist());
  auto doc = fit_document(r);
  doc["spectrum_length"] = before.size();
  doc["flatness_before"] = r.fit.flatness_before;
  doc["flatness_after"] = r.fit.residual_flatness;
  doc["peaks_before"] = peak_table(before, f_max);
  doc["peaks_after"] = peak_table(after, f_max);
  Output out(o.out);
  out.stream() << doc.dump(2) << '\n';
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  if (const auto cfg = find_config(argc, argv)) args = read_config(*cfg);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);

  Options o;
  CLI::App app{"Pair statistics of zeta zeros and prime-sum corrections"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  app.add_option("--zeros", o.zeros, "zero ordinates file");
  app.add_option("--format", o.format, "zero file format")->check(CLI::IsMember({"text", "binary"}));
  app.add_option("--bin-width", o.bin_width, "histogram bin width");
  app.add_option("--x-max", o.x_max, "largest pair difference counted");
  app.add_option("--prime-cutoff", o.prime_cutoff, "prime cutoff P");
  app.add_option("--variant", o.variant, "g | g-tilde | f-prime");
  app.add_option("--method", o.method, "spectral | spatial");
  app.add_option("--n-zeros", o.n_zeros, "use only the first N zeros");
  app.add_option("--out", o.out, "output path (default stdout)");
  app.add_option("--threads", o.threads, "worker threads");
  app.add_option("--config", o.config, "key = value defaults file");
  app.add_option("--which", o.which, "g | g-tilde | f-prime | f | F | cin");
  app.add_option("--from", o.from, "grid start");
  app.add_option("--to", o.to, "grid end");
  app.add_option("--step", o.step, "grid step");
  app.add_option("--input", o.input, "two-column CSV series for fft");
  app.add_option("--peaks", o.peaks, "write the peak table JSON here");
  app.add_option("--f-max", o.f_max, "highest predicted peak to list");
  app.add_flag("--raw", o.raw, "do not normalise the spectrum");
  app.add_option("--amplitude", o.amplitude, "apply this amplitude instead of fitting");

  std::map<std::string, std::function<int(const Options&)>> commands{
      {"primes", cmd_primes}, {"const", cmd_const},     {"eval", cmd_eval},
      {"hist", cmd_hist},     {"fft", cmd_fft},         {"fit", cmd_fit},
      {"correct", cmd_correct}, {"report", cmd_report}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name, name + " command");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error_code=parse_error: " << e.what() << '\n';
    return 2;
  }
  const auto* sub = app.get_subcommands().front();
  return commands.at(sub->get_name())(o);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const rzstats::Error& e) {
    std::cerr << "error_code=" << rzstats::to_string(e.code()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error_code=internal_error: " << e.what() << '\n';
    return 1;
  }
}
