// mat2gen command-line front end.
// exit codes: 0 ok, 1 mathematical failure or mismatch, 2 input error, 3 unsupported backend

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "mat2gen/mat2gen.hpp"

using namespace mat2gen;
using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* tool_version = "0.1.0";

enum Exit { ok = 0, math_failure = 1, input_error = 2, unsupported = 3 };

struct input_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_input(const std::string& file) {
  if (file == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(file, std::ios::binary);
  if (!in) throw input_failure("cannot read '" + file + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TupleDocument load(const std::string& file) { return parse_document(read_input(file)); }

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct Report {
  std::string command;
  std::string digest_source;  // canonical inputs, hashed into inputs_digest
  ojson results = ojson::object();
  ojson residuals = ojson::object();
  std::vector<std::string> flags;
  std::optional<std::uint64_t> seed;

  void flag(const std::string& f) {
    if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
  }

  ojson to_json() const {
    ojson j;
    j["schema_version"] = std::string(document_schema_version);
    j["command"] = command;
    j["version"] = tool_version;
    j["inputs_digest"] = "sha256:" + sha256_hex(digest_source);
    j["seed"] = seed ? ojson(*seed) : ojson(nullptr);
    j["results"] = results;
    j["residuals"] = residuals;
    j["flags"] = flags;
    j["timestamp"] = utc_now();
    return j;
  }
};

void emit(const Report& rep) { std::cout << rep.to_json().dump(2) << '\n'; }

template <class S>
ojson scalar_json(const S& z) {
  return detail::entry_json(z);
}

template <class S>
ojson line_json(const ProjLine<S>& l) {
  return ojson::array({scalar_json(l.p()), scalar_json(l.q())});
}

std::string key_of(std::initializer_list<int> idx) {
  std::string s;
  for (int i : idx) s += (s.empty() ? "" : ",") + std::to_string(i + 1);
  return s;
}

template <class S>
ojson invariants_json(const SibInvariants<S>& inv) {
  ojson j;
  j["r"] = inv.r;
  j["t1"] = ojson::array();
  for (const auto& v : inv.t1) j["t1"].push_back(scalar_json(v));
  j["t2"] = ojson::array();
  for (const auto& v : inv.t2) j["t2"].push_back(scalar_json(v));
  j["t11"] = ojson::object();
  for (const auto& [k, v] : inv.t11) j["t11"][key_of({k.first, k.second})] = scalar_json(v);
  j["t111"] = ojson::object();
  for (const auto& [k, v] : inv.t111) j["t111"][key_of({k[0], k[1], k[2]})] = scalar_json(v);
  return j;
}

void arity_flag(Report& rep, std::size_t r) {
  if (r < 2) rep.flag("BELOW_MIN_ARITY");
}

// --- check -------------------------------------------------------------------

int cmd_check(const std::string& file, double tol) {
  const TupleDocument doc = load(file);
  Report rep{"check", "check\n" + serialize(doc) + "\ntol=" + std::to_string(tol)};
  arity_flag(rep, doc.r());
  std::visit(
      [&](const auto& t) {
        using S = typename std::decay_t<decltype(t)>::scalar_type;
        const SpanResult span = generates_by_span(t, tol);
        rep.results["backend"] = std::string(to_string(doc.backend()));
        rep.results["r"] = t.r();
        rep.results["generates"] = span.generates;
        rep.results["span_dim"] = span.span_dim;
        if (t.r() == 2) {
          const FriedlandTerms<S> fr = friedland_terms(t[0], t[1], tol);
          rep.results["friedland"] = {{"generates", fr.generates}, {"lhs", scalar_json(fr.lhs)}, {"rhs", scalar_json(fr.rhs)}};
          rep.residuals["friedland_gap"] = fr.gap;
          if constexpr (!is_exact_v<S>) {
            rep.residuals["friedland_threshold"] = fr.threshold;
            if (fr.gap <= 1e3 * fr.threshold || fr.generates != span.generates) rep.flag("LOW_CONFIDENCE");
          }
        }
        const Stratum<S> st = classify(t, tol);
        rep.results["stratum"] = std::string(to_string(st.tag));
        ojson line;
        if (st.tag == StratumTag::generating) {
          line["status"] = "NONE";
        } else if (st.tag == StratumTag::eigen_shared) {
          line["status"] = "LINE";
          line["line"] = line_json(*st.line);
        } else {
          bool all_scalar = true;
          for (const auto& m : t) all_scalar = all_scalar && is_scalar(m, tol);
          line["status"] = all_scalar ? "ALL_LINES" : "LINE";
          if (!all_scalar) {
            if constexpr (!is_exact_v<S>) {
              const LineQuery<S> q = common_eigenline(t, tol);
              if (q.line) line["line"] = line_json(*q.line);
            } else if (st.line) {
              line["line"] = line_json(*st.line);
            }
          }
        }
        rep.results["common_eigenline"] = line;
      },
      doc.tuple);
  emit(rep);
  return ok;
}

// --- invariants ----------------------------------------------------------------

int cmd_invariants(const std::string& file, double tol) {
  const TupleDocument doc = load(file);
  Report rep{"invariants", "invariants\n" + serialize(doc)};
  arity_flag(rep, doc.r());
  std::visit(
      [&](const auto& t) {
        rep.results["backend"] = std::string(to_string(doc.backend()));
        rep.results["invariants"] = invariants_json(sibirskii(t));
        if (t.r() == 2 && is_traceless(t[0], tol) && is_traceless(t[1], tol)) {
          const auto c = b2_coords(t, tol);
          rep.results["b2"] = {{"z1", scalar_json(c.z1)}, {"z2", scalar_json(c.z2)}, {"x", scalar_json(c.x)}};
        }
      },
      doc.tuple);
  emit(rep);
  return ok;
}

// --- semisimplify --------------------------------------------------------------

int cmd_semisimplify(const std::string& file, double tol) {
  const TupleDocument doc = load(file);
  if (doc.backend() == Backend::exact)
    throw unsupported_backend("semisimplify needs eigenvectors; convert the document to float64");
  const FTuple& t = std::get<FTuple>(doc.tuple);
  std::cout << serialize(TupleDocument{semisimplify(t, tol)}) << '\n';
  return ok;
}

// --- orbit-eq -------------------------------------------------------------------

int cmd_orbit_eq(const std::string& fa, const std::string& fb, double tol) {
  const TupleDocument a = load(fa), b = load(fb);
  if (a.backend() != b.backend()) throw input_failure("documents use different scalar backends");
  if (a.r() != b.r()) throw input_failure("documents have different r");
  Report rep{"orbit-eq", "orbit-eq\n" + serialize(a) + "\n" + serialize(b) + "\ntol=" + std::to_string(tol)};
  arity_flag(rep, a.r());
  bool equivalent = false;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        const T& t = std::get<T>(b.tuple);
        equivalent = orbit_equivalent(s, t, tol);
        const auto fs = sibirskii(s).flatten(), ft = sibirskii(t).flatten();
        ojson deltas = ojson::array();
        double worst = 0;
        for (std::size_t k = 0; k < fs.size(); ++k) {
          const double d = magnitude(fs[k] - ft[k]);
          deltas.push_back(d);
          worst = std::max(worst, d);
        }
        rep.results["equivalent"] = equivalent;
        rep.results["invariant_deltas"] = deltas;
        rep.residuals["max_invariant_delta"] = worst;
        const auto cr = find_conjugator(s, t, tol);
        rep.results["kernel_dim"] = cr.kernel_dim;
        if (cr.g) {
          const auto& g = *cr.g;
          rep.results["conjugator"] = {{scalar_json(g.a), scalar_json(g.b)}, {scalar_json(g.c), scalar_json(g.d)}};
          rep.residuals["conjugator"] = cr.residual;
        } else {
          rep.results["conjugator"] = nullptr;
        }
        if (cr.non_generic) rep.flag("NON_GENERIC");
      },
      a.tuple);
  emit(rep);
  return equivalent ? ok : math_failure;
}

// --- realize --------------------------------------------------------------------

// "re" or "re,im"
template <class S>
S parse_value(const std::string& text) {
  const auto comma = text.find(',');
  const std::string re = text.substr(0, comma);
  const std::string im = comma == std::string::npos ? "0" : text.substr(comma + 1);
  if constexpr (is_exact_v<S>) {
    return {parse_rational(re), parse_rational(im)};
  } else {
    std::size_t p1 = 0, p2 = 0;
    const double x = std::stod(re, &p1), y = std::stod(im, &p2);
    if (p1 != re.size() || p2 != im.size() || !std::isfinite(x) || !std::isfinite(y))
      throw std::invalid_argument("malformed number '" + text + "'");
    return {x, y};
  }
}

int cmd_realize(const std::string& z1, const std::string& z2, const std::string& x, const std::string& backend) {
  if (backend == "float64") {
    const B2Coords<Cplx> c{parse_value<Cplx>(z1), parse_value<Cplx>(z2), parse_value<Cplx>(x)};
    std::cout << serialize(TupleDocument{realize_b2(c)}) << '\n';
  } else {
    const B2Coords<GaussRational> c{parse_value<GaussRational>(z1), parse_value<GaussRational>(z2),
                                    parse_value<GaussRational>(x)};
    std::cout << serialize(TupleDocument{realize_b2(c)}) << '\n';
  }
  return ok;
}

// --- b2 ---------------------------------------------------------------------------

int cmd_b2(bool roundtrip, std::uint64_t seed, std::uint64_t n, unsigned threads) {
  if (n == 0) throw input_failure("--n must be at least 1");
  Report rep{"b2", "b2\nroundtrip=" + std::to_string(roundtrip) + "\nn=" + std::to_string(n)};
  rep.seed = seed;
  std::vector<Check> cs = checks::b2(n, seed, threads, default_tol);
  if (roundtrip) {
    std::erase_if(cs, [](const Check& c) { return c.name.find("round_trip") == std::string::npos && c.name.find("after") == std::string::npos; });
  }
  bool pass = true;
  double worst = 0;
  ojson arr = ojson::array();
  for (const auto& c : cs) {
    arr.push_back(c.to_json());
    rep.residuals[c.name] = c.worst_residual;
    if (c.threshold > 0) worst = std::max(worst, c.worst_residual);
    pass = pass && c.pass();
  }
  rep.results["checks"] = arr;
  rep.results["pass"] = pass;
  rep.residuals["max"] = worst;
  emit(rep);
  return pass ? ok : math_failure;
}

// --- verify --------------------------------------------------------------------

std::optional<SuiteName> suite_from(const std::string& s) {
  for (SuiteName n : {SuiteName::ranks, SuiteName::maps, SuiteName::equivalences, SuiteName::b2, SuiteName::montecarlo})
    if (to_string(n) == s) return n;
  return std::nullopt;
}

int cmd_verify(const std::string& suite, const SuiteParams& p) {
  std::vector<SuiteName> names;
  if (suite == "all") {
    names = {SuiteName::ranks, SuiteName::maps, SuiteName::equivalences, SuiteName::b2, SuiteName::montecarlo};
  } else if (auto n = suite_from(suite)) {
    names = {*n};
  } else {
    throw input_failure("unknown suite '" + suite + "'");
  }
  if (p.r_max && *p.r_max < p.r_min) throw input_failure("--r-max is below --r-min");
  std::ostringstream src;
  src << "verify\nsuite=" << suite << "\nr_min=" << p.r_min << "\nr_max=" << (p.r_max ? std::to_string(*p.r_max) : "default")
      << "\nsamples=" << (p.samples ? std::to_string(*p.samples) : "default");
  Report rep{"verify", src.str()};
  rep.seed = p.seed;
  bool pass = true;
  ojson arr = ojson::array();
  for (SuiteName n : names) {
    const SuiteReport sr = run_suite(n, p);
    arr.push_back(sr.to_json());
    for (const auto& c : sr.checks) rep.residuals[std::string(to_string(n)) + "." + c.name] = c.worst_residual;
    pass = pass && sr.pass();
  }
  rep.results["suites"] = arr;
  rep.results["pass"] = pass;
  emit(rep);
  return pass ? ok : math_failure;
}

// --- sample -----------------------------------------------------------------------

int cmd_sample(std::size_t r, std::uint64_t n, const std::string& dist, std::uint64_t seed, const std::string& out,
               unsigned threads) {
  if (r < 1) throw input_failure("--r must be at least 1");
  if (n == 0) throw input_failure("--n must be at least 1");
  Distribution d;
  if (dist == "gaussian")
    d = Distribution::gaussian;
  else if (dist == "unit_disc")
    d = Distribution::unit_disc;
  else if (dist == "rational")
    d = Distribution::rational;
  else
    throw input_failure("unknown distribution '" + dist + "'");

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!out.empty() && out != "-") {
    file.open(out, std::ios::binary | std::ios::trunc);
    if (!file) throw input_failure("cannot open '" + out + "' for writing");
    os = &file;
  }
  // Documents are generated and classified in parallel blocks, written in order.
  std::map<std::string, std::uint64_t> freq{{"GENERATING", 0}, {"EIGEN_SHARED", 0}, {"COMMUTING", 0}};
  constexpr std::uint64_t block = 4096;
  threads = std::max(1u, threads);
  std::vector<std::pair<std::string, StratumTag>> buf;
  for (std::uint64_t start = 0; start < n; start += block) {
    const std::uint64_t len = std::min(block, n - start);
    buf.assign(len, {});
    auto work = [&](unsigned w) {
      for (std::uint64_t k = w; k < len; k += threads) {
        const AnyTuple t = sample_tuple(r, d, seed, start + k);
        const StratumTag tag = std::visit([](const auto& x) { return classify(x).tag; }, t);
        buf[k] = {serialize(TupleDocument{t}), tag};
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& th : pool) th.join();
    for (const auto& [text, tag] : buf) {
      *os << text << '\n';
      ++freq[std::string(to_string(tag))];
    }
  }
  os->flush();
  if (!*os) throw input_failure("write failed");

  Report rep{"sample", "sample\nr=" + std::to_string(r) + "\nn=" + std::to_string(n) + "\ndist=" + dist};
  rep.seed = seed;
  arity_flag(rep, r);
  rep.results["r"] = r;
  rep.results["n"] = n;
  rep.results["dist"] = dist;
  rep.results["backend"] = d == Distribution::rational ? "gaussian-rational" : "float64";
  rep.results["strata"] = freq;
  // With documents on stdout the summary goes to stderr.
  (os == &std::cout ? std::cerr : std::cout) << rep.to_json().dump(2) << '\n';
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mat2gen: generating tuples of 2x2 complex matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version);

  double tol = default_tol;
  std::string file, file_b;

  auto* check = app.add_subcommand("check", "generation test, common eigenline, stratum");
  check->add_option("file", file, "tuple document, - for stdin")->required();
  check->add_option("--tol", tol, "relative tolerance (float64)");

  auto* inv = app.add_subcommand("invariants", "Sibirskii trace invariants");
  inv->add_option("file", file, "tuple document, - for stdin")->required();
  inv->add_option("--tol", tol, "traceless test tolerance");

  auto* semi = app.add_subcommand("semisimplify", "diagonal representative of a non-generating tuple");
  semi->add_option("file", file, "tuple document, - for stdin")->required();
  semi->add_option("--tol", tol, "relative tolerance");

  auto* orb = app.add_subcommand("orbit-eq", "compare the orbits of two tuples");
  orb->add_option("file_a", file, "first tuple document")->required();
  orb->add_option("file_b", file_b, "second tuple document")->required();
  orb->add_option("--tol", tol, "relative tolerance");

  std::string z1, z2, x, backend = "float64";
  auto* real = app.add_subcommand("realize", "traceless pair with given (Tr A1^2, Tr A2^2, Tr A1A2)");
  real->add_option("--z1", z1, "re or re,im")->required();
  real->add_option("--z2", z2, "re or re,im")->required();
  real->add_option("--x", x, "re or re,im")->required();
  real->add_option("--backend", backend, "float64 or gaussian-rational")
      ->check(CLI::IsMember({"float64", "gaussian-rational"}));

  bool roundtrip = false;
  std::uint64_t b2_seed = 0, b2_n = 10000;
  unsigned threads = 1;
  auto* b2c = app.add_subcommand("b2", "B(2) model round trips");
  b2c->add_flag("--roundtrip", roundtrip, "round-trip checks only");
  b2c->add_option("--seed", b2_seed, "random seed (default 0)");
  b2c->add_option("--n", b2_n, "samples per check");
  b2c->add_option("--threads", threads, "worker threads");

  std::string suite;
  SuiteParams sp;
  std::size_t r_max = 0;
  std::uint64_t samples = 0;
  auto* ver = app.add_subcommand("verify", "run verification suites");
  ver->add_option("--suite", suite, "ranks, maps, equivalences, b2, montecarlo or all")->required();
  ver->add_option("--seed", sp.seed, "random seed")->required();
  ver->add_option("--r-min", sp.r_min, "smallest r")->check(CLI::PositiveNumber);
  auto* rmax_opt = ver->add_option("--r-max", r_max, "largest r")->check(CLI::PositiveNumber);
  auto* samples_opt = ver->add_option("--samples", samples, "samples per check")->check(CLI::PositiveNumber);
  ver->add_option("--threads", sp.threads, "worker threads");

  std::size_t sr = 2;
  std::uint64_t sn = 1;
  std::uint64_t sseed = 0;
  std::string dist = "gaussian", out;
  auto* smp = app.add_subcommand("sample", "write random tuple documents, one per line");
  smp->add_option("--r", sr, "tuple length")->required();
  smp->add_option("--n", sn, "number of documents")->required();
  smp->add_option("--dist", dist, "gaussian, unit_disc or rational");
  smp->add_option("--seed", sseed, "random seed")->required();
  smp->add_option("--out", out, "output file, - or absent for stdout");
  smp->add_option("--threads", threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return input_error;
  }

  try {
    if (*check) return cmd_check(file, tol);
    if (*inv) return cmd_invariants(file, tol);
    if (*semi) return cmd_semisimplify(file, tol);
    if (*orb) return cmd_orbit_eq(file, file_b, tol);
    if (*real) return cmd_realize(z1, z2, x, backend);
    if (*b2c) return cmd_b2(roundtrip, b2_seed, b2_n, threads);
    if (*ver) {
      if (*rmax_opt) sp.r_max = r_max;
      if (*samples_opt) sp.samples = samples;
      return cmd_verify(suite, sp);
    }
    if (*smp) return cmd_sample(sr, sn, dist, sseed, out, threads);
  } catch (const unsupported_backend& e) {
    std::cerr << "error: " << e.what() << '\n';
    return unsupported;
  } catch (const document_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  } catch (const input_failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  } catch (const wrong_arity& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  } catch (const not_traceless& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return input_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return math_failure;
  }
  return input_error;
}
