// phimod: command-line front end.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "phimod/phimod.hpp"
#include "selftest.hpp"

using namespace phimod;

namespace {

constexpr int kExitOk = 0, kExitInput = 1, kExitUndecided = 2, kExitBox = 3;

struct Globals {
  std::string file;
  bool reproducible = false;
  int jobs = 1;
};

std::string read_input(const Globals& g) {
  if (!g.file.empty()) {
    std::ifstream in(g.file);
    if (!in) throw ValidationError("cannot open " + g.file);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  return {std::istreambuf_iterator<char>(std::cin), {}};
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void emit(const Globals& g, const std::string& command, Json result) {
  Json out{{"command", command}};
  if (!g.reproducible) out["generated_at"] = timestamp();
  out["result"] = std::move(result);
  std::cout << out.dump(2) << "\n";
}

const SeriesMatrix& need(const std::optional<SeriesMatrix>& m, const char* key) {
  if (!m) throw ValidationError(std::string("job needs '") + key + "'");
  return *m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phi-modules over F_q((u)): conjugation, isomorphism, Kisin varieties and the tree"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--file", g.file, "job file (default: standard input)");
  app.add_flag("--reproducible", g.reproducible, "omit timestamps");
  app.add_option("--jobs", g.jobs, "worker threads for scans")->check(CLI::PositiveNumber);

  auto* cartan = app.add_subcommand("cartan", "Cartan type of A");
  auto* conj = app.add_subcommand("conj-solve", "solve g^-1 A phi(g) = h^-1 A for g in U_n");
  std::optional<Exp> conj_n;
  conj->add_option("--n", conj_n, "congruence level of h");
  auto* isom = app.add_subcommand("isom", "decide whether A and B are isomorphic");

  auto* kisin = app.add_subcommand("kisin", "points of the Kisin variety C_nu(A)");
  std::string nu_text, mode_text;
  int ext = 0;
  kisin->add_option("--nu", nu_text, "coweight, e.g. 1,0");
  kisin->add_option("--ext", ext, "extension degree of the points");
  kisin->add_option("--mode", mode_text, "open or closed")->check(CLI::IsMember({"open", "closed"}));

  auto* flat = app.add_subcommand("flat", "lattices with u^e M in Phi(phi^* M) in M");
  std::optional<Exp> flat_e;
  flat->add_option("--e", flat_e, "ramification bound");
  flat->add_option("--ext", ext, "extension degree of the points");

  auto* local = app.add_subcommand("local-model", "count F_q-points of the local model");
  local->set_help_flag("--help", "print this help message and exit");
  std::optional<Exp> lm_e, lm_h;
  local->add_option("--e", lm_e, "e");
  local->add_option("--h", lm_h, "height");

  auto* tree = app.add_subcommand("tree", "the Bruhat-Tits tree (d = 2)");
  tree->require_subcommand(1);
  auto* tree_classify = tree->add_subcommand("classify", "classify A by its displacement function");
  auto* tree_export = tree->add_subcommand("export", "export a ball with displacements");
  std::optional<Exp> radius, threshold;
  std::string format;
  tree_export->add_option("--radius", radius, "ball radius");
  tree_export->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  tree_export->add_option("--threshold", threshold, "flag vertices with displacement at most this");

  auto* self = app.add_subcommand("selftest", "run the invariant suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (self->parsed()) {
      const auto results = selftest::run_all();
      Json suites = Json::array();
      bool all = true;
      for (const auto& r : results) {
        std::cerr << std::left << std::setw(14) << r.name << (r.passed ? "PASS" : "FAIL") << "  " << std::fixed
                  << std::setprecision(2) << r.seconds << "s" << (r.detail.empty() ? "" : "  " + r.detail) << "\n";
        suites.push_back(Json{{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        all = all && r.passed;
      }
      emit(g, "selftest", Json{{"passed", all}, {"suites", std::move(suites)}});
      return all ? kExitOk : kExitInput;
    }

    const JobSpec job = parse_job(read_input(g));
    const double limit = job.box_limit.value_or(kDefaultBoxLimit);

    if (cartan->parsed()) {
      const Coweight t = cartan_type(need(job.A, "A"));
      emit(g, "cartan", Json{{"type", to_json(t)}, {"text", t.str()}});
    } else if (conj->parsed()) {
      const SeriesMatrix& a = need(job.A, "A");
      const SeriesMatrix& h = need(job.h, "h");
      const std::optional<Exp> n = conj_n ? conj_n : job.n;
      if (!n) throw ValidationError("conj-solve needs n");
      emit(g, "conj-solve", to_json(conj_solve_traced(a, h, *n, {job.precision, ProductOrder::LeftToRight})));
    } else if (isom->parsed()) {
      IsomOptions opt;
      opt.prec = job.precision;
      const IsomReport r = isom_test(need(job.A, "A"), need(job.B, "B"), opt);
      emit(g, "isom", to_json(r));
      if (r.verdict == Verdict::Undecided) return kExitUndecided;
    } else if (kisin->parsed()) {
      const PhiModule a(need(job.A, "A"), job.precision);
      const std::optional<Coweight> nu = nu_text.empty() ? job.nu : std::optional<Coweight>(Coweight::parse(nu_text));
      if (!nu) throw ValidationError("kisin needs nu");
      const std::string mode = !mode_text.empty() ? mode_text : job.mode.value_or("closed");
      const KisinReport r = kisin_points(a, *nu, ext ? ext : job.ext, mode == "open" ? KisinMode::Open : KisinMode::Closed,
                                         {limit, g.jobs, 0});
      emit(g, "kisin", to_json(r));
    } else if (flat->parsed()) {
      const PhiModule a(need(job.A, "A"), job.precision);
      const std::optional<Exp> e = flat_e ? flat_e : job.e;
      if (!e) throw ValidationError("flat needs e");
      emit(g, "flat", to_json(flat_points(a, *e, ext ? ext : job.ext, {limit, g.jobs, 0})));
    } else if (local->parsed()) {
      const std::optional<Exp> e = lm_e ? lm_e : job.e;
      const std::optional<Exp> h = lm_h ? lm_h : job.height;
      if (!e || !h) throw ValidationError("local-model needs e and h");
      if (job.d < 1) throw ValidationError("local-model needs d");
      const std::size_t count = local_model_count(job.field, job.d, *e, *h, limit, g.jobs);
      emit(g, "local-model", Json{{"d", job.d}, {"e", *e}, {"h", *h}, {"q", job.field.q()}, {"count", count}});
    } else if (tree_classify->parsed()) {
      const SeriesMatrix& a = need(job.A, "A");
      RankOneOptions ropt;
      if (job.depth) ropt.depth = *job.depth;
      emit(g, "tree classify", to_json(classify(a, ropt, limit, g.jobs)));
    } else if (tree_export->parsed()) {
      const SeriesMatrix& a = need(job.A, "A");
      if (a.d() != 2) throw ValidationError("tree export needs d = 2");
      const Exp r = radius ? *radius : job.radius.value_or(2);
      const std::string fmt = !format.empty() ? format : job.format.value_or("json");
      ExportOptions opt;
      opt.threshold = threshold ? threshold : job.threshold;
      opt.limit = limit;
      opt.jobs = g.jobs;
      if (fmt == "dot") {
        std::cout << export_ball(a, TreeVertex::standard(a.field()), r, ExportFormat::Dot, opt);
      } else {
        emit(g, "tree export", Json::parse(export_ball(a, TreeVertex::standard(a.field()), r, ExportFormat::Json, opt)));
      }
    }
    return kExitOk;
  } catch (const BoxTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBox;
  } catch (const InsufficientPrecision& e) {
    std::cerr << "error: insufficient precision: " << e.what() << "\n";
    return kExitUndecided;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
