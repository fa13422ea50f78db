// Command-line front end: selftest | kernel | gap | sample | render |
// tacnode | converge. Flat `key = value` config files; CLI flags override
// config entries which override defaults. Exit codes: 0 success,
// 1 numerical failure, 2 usage error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <random>

#include "aztac/acceptance.hpp"
#include "aztac/airy.hpp"
#include "aztac/io.hpp"
#include "aztac/kernels.hpp"
#include "aztac/sampler.hpp"
#include "aztac/scaling.hpp"

using namespace aztac;

namespace {

struct Common {
  double a = 0.5;
  int n = 8;
  int m = 2;
  double sigma = 1.0;
  int t = 8;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  std::string config;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--a", c.a, "vertical-domino weight in (0,1)");
  app->add_option("--n", c.n, "diamond order (even)");
  app->add_option("--m", c.m, "inlier parameter (M = 2m+1)");
  app->add_option("--sigma", c.sigma, "pressure parameter");
  app->add_option("--t", c.t, "scaling size parameter (n = 2t)");
  app->add_option("--seed", c.seed, "master RNG seed");
  app->add_option("--tol", c.tol, "quadrature relative tolerance");
  app->add_option("--config", c.config, "key = value config file");
  app->add_option("--out", c.out, "output path (default stdout)");
  app->add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

// config file entries fill any option the user did not pass on the CLI
void apply_config(CLI::App* app, Common& c) {
  if (c.config.empty()) return;
  auto kv = parse_config_file(c.config);
  auto set_if_default = [&](const char* flag, auto& slot) {
    auto it = kv.find(flag + 2);  // strip "--"
    if (it == kv.end()) return;
    if (app->count(flag) == 0) {
      std::istringstream ss(it->second);
      ss >> slot;
    }
  };
  set_if_default("--a", c.a);
  set_if_default("--n", c.n);
  set_if_default("--m", c.m);
  set_if_default("--sigma", c.sigma);
  set_if_default("--t", c.t);
  set_if_default("--seed", c.seed);
  set_if_default("--tol", c.tol);
}

void emit(const Common& c, const CsvTable& table) {
  std::string text = (c.format == "json") ? table.to_json() : table.to_csv();
  if (c.out.empty())
    std::cout << text;
  else
    write_file(c.out, text);
}

void stamp(CsvTable& t, const Common& c) {
  t.metadata["tool"] = kToolVersion;
  t.metadata["a"] = fmt_num(c.a);
  t.metadata["seed"] = std::to_string(c.seed);
  t.metadata["tol"] = fmt_num(c.tol);
}

KernelRep parse_rep(const std::string& s) {
  if (s == "em") return KernelRep::EM;
  if (s == "k1") return KernelRep::K1;
  if (s == "k2") return KernelRep::K2;
  if (s == "saddle") return KernelRep::Saddle;
  throw CLI::ValidationError("--rep", "unknown representation " + s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double Aztec diamond / tacnode numerical laboratory"};
  app.require_subcommand(1);

  Common c;

  auto* sc_self = app.add_subcommand("selftest", "run the acceptance suite");
  add_common(sc_self, c);

  auto* sc_kernel = app.add_subcommand("kernel", "extended-kernel values");
  std::string rep = "em";
  std::string points;
  sc_kernel->add_option("--rep", rep, "em|k1|k2|saddle|all");
  sc_kernel->add_option("--points", points,
                        "semicolon-separated r,x,s,y query points");
  add_common(sc_kernel, c);

  auto* sc_gap = app.add_subcommand("gap", "gap probabilities");
  std::string lines_arg;
  sc_gap->add_option("--lines", lines_arg,
                     "semicolon-separated r:lo:hi window specs");
  sc_gap->add_option("--rep", rep, "kernel representation");
  add_common(sc_gap, c);

  auto* sc_sample = app.add_subcommand("sample", "draw tiling samples");
  std::string sampler_kind = "shuffle";
  long nsamples = 1;
  sc_sample->add_option("--type", sampler_kind, "shuffle (single) or mcmc (double)");
  sc_sample->add_option("--samples", nsamples, "number of samples");
  add_common(sc_sample, c);

  auto* sc_render = app.add_subcommand("render", "render a tiling file to SVG");
  std::string in_path;
  RenderSpec rspec;
  sc_render->add_option("--in", in_path, "serialized tiling file")->required();
  sc_render->add_option("--cell-px", rspec.cell_px, "pixels per lattice cell");
  sc_render->add_flag("--ellipses", rspec.ellipses, "arctic ellipse overlay");
  sc_render->add_flag("--level-lines", rspec.level_lines, "outlier level lines");
  add_common(sc_render, c);

  auto* sc_tac = app.add_subcommand("tacnode", "tacnode kernel values");
  std::string form = "all";
  std::string tac_points = "0.3,0.4,-0.2,-0.1";
  double delta = 0.5;
  sc_tac->add_option("--form", form, "i|ii|iii|brownian|all");
  sc_tac->add_option("--points", tac_points,
                     "semicolon-separated tau1,xi1,tau2,xi2");
  sc_tac->add_option("--delta", delta, "form-(iii) contour offset");
  add_common(sc_tac, c);

  auto* sc_conv = app.add_subcommand("converge", "finite-size convergence table");
  std::string tlist = "8,16,32";
  std::string conv_points = "0.2,0.5,-0.1,-0.3;0.0,-0.5,0.0,-0.5";
  std::string baseline;
  sc_conv->add_option("--tlist", tlist, "comma-separated t values");
  sc_conv->add_option("--points", conv_points, "tau1,xi1,tau2,xi2 list");
  sc_conv->add_option("--baseline", baseline,
                      "compare against a committed baseline CSV");
  sc_conv->add_option("--baseline-tol", c.tol, "baseline comparison tolerance");
  add_common(sc_conv, c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sc_self->parsed()) {
      apply_config(sc_self, c);
      auto [report, ok] = run_selftest(c.seed);
      if (c.out.empty())
        std::cout << report;
      else
        write_file(c.out, report);
      return ok ? 0 : 1;
    }

    if (sc_kernel->parsed()) {
      apply_config(sc_kernel, c);
      ModelShape shape{c.a, c.n, c.m};
      KernelContext ctx(shape);
      std::vector<std::array<int, 4>> pts;
      std::stringstream ss(points);
      std::string tok;
      while (std::getline(ss, tok, ';')) {
        auto v = parse_int_list(tok);
        if (v.size() != 4)
          throw CLI::ValidationError("--points", "expected r,x,s,y");
        pts.push_back({v[0], v[1], v[2], v[3]});
      }
      if (pts.empty())
        throw CLI::ValidationError("--points", "at least one query point");
      CsvTable t;
      stamp(t, c);
      t.metadata["n"] = std::to_string(c.n);
      t.metadata["m"] = std::to_string(c.m);
      t.columns = {"r", "x", "s", "y", "value_re", "value_im",
                   "representation", "err_est"};
      std::vector<std::string> reps =
          (rep == "all") ? std::vector<std::string>{"em", "k1", "k2"}
                         : std::vector<std::string>{rep};
      for (const auto& p : pts)
        for (const auto& rp : reps) {
          double v = ctx.ext_kernel(parse_rep(rp), p[0], p[1], p[2], p[3]);
          t.add_row({std::to_string(p[0]), std::to_string(p[1]),
                     std::to_string(p[2]), std::to_string(p[3]), fmt_num(v),
                     "0", rp, fmt_num(c.tol)});
        }
      emit(c, t);
      return 0;
    }

    if (sc_gap->parsed()) {
      apply_config(sc_gap, c);
      ModelShape shape{c.a, c.n, c.m};
      KernelContext ctx(shape);
      std::vector<int> rs;
      std::vector<std::pair<int, int>> windows;
      std::stringstream ss(lines_arg);
      std::string tok;
      while (std::getline(ss, tok, ';')) {
        if (tok.empty()) continue;
        int r, lo, hi;
        if (std::sscanf(tok.c_str(), "%d:%d:%d", &r, &lo, &hi) != 3)
          throw CLI::ValidationError("--lines", "expected r:lo:hi");
        rs.push_back(r);
        windows.emplace_back(lo, hi);
      }
      double p = ctx.gap_probability(rs, windows, parse_rep(rep == "all" ? "em" : rep));
      CsvTable t;
      stamp(t, c);
      t.metadata["n"] = std::to_string(c.n);
      t.metadata["m"] = std::to_string(c.m);
      t.columns = {"lines", "probability"};
      t.add_row({lines_arg.empty() ? "(empty)" : lines_arg, fmt_num(p)});
      emit(c, t);
      return 0;
    }

    if (sc_sample->parsed()) {
      apply_config(sc_sample, c);
      std::mt19937_64 rng(c.seed);
      std::ostringstream os;
      if (sampler_kind == "shuffle") {
        Region rg = Region::single_diamond(c.n);
        for (long q = 0; q < nsamples; ++q)
          os << shuffle_single_aztec(rg, c.a, rng).serialize() << "\n";
      } else if (sampler_kind == "mcmc") {
        ModelShape shape{c.a, c.n, c.m};
        Region rg = Region::double_diamond(shape);
        ChainConfig cfg;
        cfg.master_seed = c.seed;
        cfg.samples = nsamples;
        std::vector<std::string> dumps;
        run_mcmc(rg, c.a, cfg, [&](const Tiling& t) {
          dumps.push_back(t.serialize());
          return 0.0;
        });
        for (const auto& s : dumps) os << s << "\n";
      } else {
        throw CLI::ValidationError("--type", "shuffle or mcmc");
      }
      if (c.out.empty())
        std::cout << os.str();
      else
        write_file(c.out, os.str());
      return 0;
    }

    if (sc_render->parsed()) {
      apply_config(sc_render, c);
      std::string text = read_file(in_path);
      // shape header decides the region
      Region rg = text.rfind("# single", 0) == 0
                      ? Region::single_diamond(c.n)
                      : Region::double_diamond(ModelShape{c.a, c.n, c.m});
      // honor the n/m recorded in the header when present
      {
        int hn = 0, hm = 0;
        if (std::sscanf(text.c_str(), "# double n=%d m=%d", &hn, &hm) == 2)
          rg = Region::double_diamond(ModelShape{c.a, hn, hm});
        else if (std::sscanf(text.c_str(), "# single n=%d m=%d", &hn, &hm) == 2)
          rg = Region::single_diamond(hn);
      }
      Tiling t = Tiling::deserialize(&rg, text);
      std::string svg = render_svg(t, rspec);
      if (c.out.empty())
        std::cout << svg;
      else
        write_file(c.out, svg);
      return 0;
    }

    if (sc_tac->parsed()) {
      apply_config(sc_tac, c);
      AiryContext ctx(c.sigma);
      CsvTable t;
      stamp(t, c);
      t.metadata["sigma"] = fmt_num(c.sigma);
      t.columns = {"tau1", "xi1", "tau2", "xi2", "form", "value", "err_est"};
      std::vector<std::pair<std::string, TacForm>> forms;
      if (form == "all")
        forms = {{"i", TacForm::I},
                 {"ii", TacForm::II},
                 {"iii", TacForm::III},
                 {"brownian", TacForm::Brownian}};
      else if (form == "i")
        forms = {{"i", TacForm::I}};
      else if (form == "ii")
        forms = {{"ii", TacForm::II}};
      else if (form == "iii")
        forms = {{"iii", TacForm::III}};
      else if (form == "brownian")
        forms = {{"brownian", TacForm::Brownian}};
      else
        throw CLI::ValidationError("--form", "i|ii|iii|brownian|all");
      std::stringstream ss(tac_points);
      std::string tok;
      while (std::getline(ss, tok, ';')) {
        auto v = parse_double_list(tok);
        if (v.size() != 4)
          throw CLI::ValidationError("--points", "expected tau1,xi1,tau2,xi2");
        TacnodePoint p{v[0], v[1], v[2], v[3], delta};
        for (const auto& [name, f] : forms)
          t.add_row({fmt_num(v[0]), fmt_num(v[1]), fmt_num(v[2]), fmt_num(v[3]),
                     name, fmt_num(ctx.tacnode(f, p)), fmt_num(1e-7)});
      }
      emit(c, t);
      return 0;
    }

    if (sc_conv->parsed()) {
      apply_config(sc_conv, c);
      std::vector<TacnodePoint> pts;
      std::stringstream ss(conv_points);
      std::string tok;
      while (std::getline(ss, tok, ';')) {
        auto v = parse_double_list(tok);
        if (v.size() != 4)
          throw CLI::ValidationError("--points", "expected tau1,xi1,tau2,xi2");
        pts.push_back({v[0], v[1], v[2], v[3], 0.5});
      }
      auto rows = convergence_table(c.a, c.sigma, pts, parse_int_list(tlist));
      CsvTable t;
      stamp(t, c);
      t.metadata["sigma"] = fmt_num(c.sigma);
      t.columns = {"t",       "tau1",          "xi1",
                   "tau2",    "xi2",           "finite_value",
                   "tacnode_value", "abs_error", "res_m", "res_r", "res_s",
                   "res_x",   "res_y"};
      for (const auto& row : rows)
        t.add_row({std::to_string(row.pt.t), fmt_num(row.pt.tau1),
                   fmt_num(row.pt.xi1), fmt_num(row.pt.tau2),
                   fmt_num(row.pt.xi2), fmt_num(row.finite_value),
                   fmt_num(row.tacnode_value), fmt_num(row.abs_error),
                   fmt_num(row.pt.res_m), fmt_num(row.pt.res_r),
                   fmt_num(row.pt.res_s), fmt_num(row.pt.res_x),
                   fmt_num(row.pt.res_y)});
      if (!baseline.empty()) {
        // compare against the committed baseline within tolerance
        std::string base = read_file(baseline);
        std::istringstream bs(base);
        std::string line;
        std::vector<double> base_vals;
        while (std::getline(bs, line)) {
          if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0)
            continue;
          auto v = parse_double_list(line);
          if (v.size() >= 8) base_vals.push_back(v[5]);
        }
        if (base_vals.size() != rows.size())
          throw numerics_error("baseline row count mismatch");
        double tol = std::max(c.tol, 1e-7);
        for (size_t q = 0; q < rows.size(); ++q)
          if (std::abs(rows[q].finite_value - base_vals[q]) > tol)
            throw numerics_error("baseline mismatch at row " +
                                 std::to_string(q));
        t.metadata["baseline"] = "matched " + baseline;
      }
      emit(c, t);
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const numerics_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
