#pragma once

// Command-line front door. Verbs: gen, recognize, color, transitive, verify,
// verify-seq, bench. Exit codes: 0 success, 1 invalid input or failed
// verification, 2 contract violation, 3 budget exceeded.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "stellar/engine/driver.hpp"
#include "stellar/io.hpp"
#include "stellar/oracle.hpp"
#include "stellar/pattern.hpp"

namespace stellar::cli {

inline int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InternalContractViolation:
    case ErrorKind::ExtractorBroke:
      return 2;
    case ErrorKind::BudgetExceeded:
    case ErrorKind::TooLarge:
      return 3;
    default:
      return 1;
  }
}

struct PatternInput {
  Tournament h;
  std::optional<Ordering> theta;
};

// A pattern is a catalog name or a file holding the tournament format plus an
// optional trailing line with the ordering.
inline PatternInput load_pattern(const std::string& ref) {
  for (const auto& name : pat::catalog_names())
    if (name == ref) {
      pat::Pattern p = pat::catalog(ref);
      return {p.h, p.theta};
    }
  std::ifstream in(ref, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, "no catalog pattern or readable file named '" + ref + "'");
  Tournament h = io::read_tournament(in);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Ordering theta;
    long long v;
    while (ls >> v) {
      if (v < 0 || static_cast<std::size_t>(v) >= h.size())
        fail(ErrorKind::ParseError, "ordering line has a bad vertex id");
      theta.push_back(static_cast<std::size_t>(v));
    }
    if (theta.size() != h.size())
      fail(ErrorKind::ParseError, "ordering line must list every vertex once");
    return {std::move(h), std::move(theta)};
  }
  return {std::move(h), std::nullopt};
}

inline Ordering read_ordering_file(const std::string& path, std::size_t n) {
  std::ifstream of(path);
  if (!of) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
  Ordering theta;
  long long v;
  while (of >> v) {
    if (v < 0 || static_cast<std::size_t>(v) >= n)
      fail(ErrorKind::ParseError, "ordering file has a bad vertex id");
    theta.push_back(static_cast<std::size_t>(v));
  }
  if (theta.size() != n)
    fail(ErrorKind::ParseError, "ordering file must list every vertex exactly once");
  return theta;
}

inline Tournament load_tournament(const std::string& path, std::istream& stdin_stream) {
  if (path == "-") return io::read_tournament(stdin_stream);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
  return io::read_tournament(in);
}

template <typename Emit>
void write_out(const std::string& out_path, std::ostream& stdout_stream, Emit&& emit) {
  if (out_path.empty()) {
    emit(stdout_stream);
  } else {
    io::atomic_write(out_path, emit);
  }
}

struct CommonOpts {
  std::string mode = "relaxed";
  std::string lambda = "1/4";
  std::size_t k = 2;
  std::string Lambda = "1/4";
  std::string epsilon = "1/3";
  std::size_t oracle_cap = 18;
  std::string fallback = "oracle";
  std::string config_file;
  unsigned jobs = 1;
};

inline void add_engine_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--mode", o.mode)->check(CLI::IsMember({"strict", "relaxed"}));
  cmd->add_option("--lambda", o.lambda);
  cmd->add_option("--k", o.k);
  cmd->add_option("--Lambda", o.Lambda);
  cmd->add_option("--epsilon", o.epsilon);
  cmd->add_option("--oracle-cap", o.oracle_cap);
  cmd->add_option("--fallback", o.fallback)
      ->check(CLI::IsMember({"oracle", "greedy", "singleton"}));
  cmd->add_option("--config", o.config_file);
  cmd->add_option("--jobs", o.jobs);
}

inline void apply_config_file(CommonOpts& o) {
  if (o.config_file.empty()) return;
  std::ifstream in(o.config_file);
  if (!in) fail(ErrorKind::ParseError, "cannot open config '" + o.config_file + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) io::parse_fail(lineno, "expected key=value");
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "mode")
      o.mode = val;
    else if (key == "lambda")
      o.lambda = val;
    else if (key == "k")
      o.k = std::stoul(val);
    else if (key == "Lambda")
      o.Lambda = val;
    else if (key == "epsilon")
      o.epsilon = val;
    else if (key == "oracle_cap")
      o.oracle_cap = std::stoul(val);
    else if (key == "fallback")
      o.fallback = val;
    else if (key == "seed")
      ;  // seed is a per-verb flag; accepted here for config-file parity
    else
      io::parse_fail(lineno, "unknown config key '" + key + "'");
  }
}

inline engine::ColorConfig to_config(const CommonOpts& o, std::optional<Ordering> theta) {
  engine::ColorConfig cfg;
  cfg.mode = o.mode == "strict" ? engine::Mode::strict : engine::Mode::relaxed;
  cfg.lambda = parse_rat(o.lambda);
  cfg.k = o.k;
  cfg.Lambda = parse_rat(o.Lambda);
  cfg.eps = parse_rat(o.epsilon);
  cfg.oracle_cap = o.oracle_cap;
  cfg.theta = std::move(theta);
  if (o.fallback == "oracle")
    cfg.fallback = engine::Fallback::oracle;
  else if (o.fallback == "greedy")
    cfg.fallback = engine::Fallback::greedy;
  else
    cfg.fallback = engine::Fallback::singleton;
  return cfg;
}

inline int run(std::vector<std::string> args, std::istream& in_stream, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"tournament coloring toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a seeded random tournament");
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n)->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out);

  // recognize
  auto* rec = app.add_subcommand("recognize", "constellation/galaxy recognition");
  std::string rec_pattern;
  std::string rec_ordering_file;
  unsigned rec_jobs = 1;
  rec->add_option("--pattern", rec_pattern)->required();
  rec->add_option("--ordering", rec_ordering_file);
  rec->add_option("--jobs", rec_jobs);

  // color
  auto* col = app.add_subcommand("color", "properly color a tournament");
  std::string col_pattern, col_input = "-", col_out, col_ordering;
  CommonOpts col_opts;
  col->add_option("--pattern", col_pattern)->required();
  col->add_option("input", col_input);
  col->add_option("--out", col_out);
  col->add_option("--ordering", col_ordering);
  add_engine_flags(col, col_opts);

  // transitive
  auto* tr = app.add_subcommand("transitive", "extract a transitive subtournament");
  std::string tr_pattern, tr_input = "-", tr_ordering;
  bool tr_oracle = false;
  CommonOpts tr_opts;
  tr->add_option("--pattern", tr_pattern);
  tr->add_option("input", tr_input);
  tr->add_flag("--oracle", tr_oracle);
  tr->add_option("--ordering", tr_ordering);
  add_engine_flags(tr, tr_opts);

  // verify
  auto* ver = app.add_subcommand("verify", "check a coloring file");
  std::string ver_tournament, ver_coloring;
  ver->add_option("tournament", ver_tournament)->required();
  ver->add_option("coloring", ver_coloring)->required();

  // verify-seq
  auto* vseq = app.add_subcommand("verify-seq", "validate a sequence file");
  std::string vs_tournament, vs_sequence;
  std::string vs_c = "0", vs_lambda = "1", vs_eps = "1", vs_M;
  bool vs_smooth = false;
  std::string vs_strong;
  vseq->add_option("tournament", vs_tournament)->required();
  vseq->add_option("sequence", vs_sequence)->required();
  vseq->add_option("--c", vs_c);
  vseq->add_option("--lambda", vs_lambda);
  vseq->add_option("--epsilon", vs_eps);
  vseq->add_option("--M", vs_M);
  vseq->add_flag("--smooth", vs_smooth);
  vseq->add_option("--strong", vs_strong);

  // bench
  auto* bench = app.add_subcommand("bench", "wall-clock per stage");
  std::size_t bench_n = 64;
  std::uint64_t bench_seed = 1;
  std::string bench_pattern = "fig3";
  CommonOpts bench_opts;
  bench->add_option("--n", bench_n);
  bench->add_option("--seed", bench_seed);
  bench->add_option("--pattern", bench_pattern);
  add_engine_flags(bench, bench_opts);

  std::vector<const char*> argv;
  argv.push_back("stellar");
  for (auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (*gen) {
      Tournament t = random_tournament(gen_n, gen_seed);
      write_out(gen_out, out, [&](std::ostream& os) { io::write_tournament(t, os); });
      return 0;
    }

    if (*rec) {
      PatternInput p = load_pattern(rec_pattern);
      Ordering theta;
      bool is_constellation = false;
      if (!rec_ordering_file.empty()) {
        theta = read_ordering_file(rec_ordering_file, p.h.size());
        is_constellation = pat::is_constellation_ordering(p.h, theta);
      } else if (p.theta && pat::is_constellation_ordering(p.h, *p.theta)) {
        theta = *p.theta;
        is_constellation = true;
      } else {
        auto found = pat::find_constellation_ordering(p.h, 9, rec_jobs);
        if (found) {
          theta = *found;
          is_constellation = true;
        }
      }
      out << "constellation: " << (is_constellation ? "yes" : "no") << "\n";
      if (is_constellation) {
        out << "ordering:";
        for (auto v : theta) out << " " << v;
        out << "\n";
        out << "galaxy: " << (pat::is_galaxy_ordering(p.h, theta) ? "yes" : "no") << "\n";
      }
      return 0;
    }

    if (*col) {
      apply_config_file(col_opts);
      PatternInput p = load_pattern(col_pattern);
      if (!col_ordering.empty()) p.theta = read_ordering_file(col_ordering, p.h.size());
      Tournament t = load_tournament(col_input, in_stream);
      engine::ColorConfig cfg = to_config(col_opts, p.theta);
      Coloring coloring;
      std::size_t classes = 0;
      bool have_ordering =
          (p.theta && pat::is_constellation_ordering(p.h, *p.theta)) ||
          pat::find_constellation_ordering(p.h).has_value();
      if (have_ordering) {
        if (cfg.theta && !pat::is_constellation_ordering(p.h, *cfg.theta)) cfg.theta.reset();
        auto res = engine::color_h_free(p.h, t, cfg);
        coloring = std::move(res.coloring);
        classes = res.classes;
      } else {
        // the pattern is not a constellation; color through the fallback
        // ladder alone so the pipeline stays total
        err << "note: pattern is not a constellation; using the fallback extractor only\n";
        coloring.color.assign(t.size(), 0);
        Bitset rest = t.vertices();
        long color_id = 0;
        while (!rest.empty()) {
          Bitset cls = engine::detail::fallback_extract(t, rest, cfg);
          ++color_id;
          for (std::size_t v = cls.first(); v != Bitset::npos; v = cls.next(v)) {
            coloring.color[v] = color_id;
            rest.reset(v);
          }
        }
        classes = static_cast<std::size_t>(color_id);
      }
      if (t.size() > 0 && !verify_coloring(t, coloring))
        fail(ErrorKind::InternalContractViolation, "emitted coloring is not proper");
      if (!col_out.empty()) {
        io::atomic_write(col_out, [&](std::ostream& os) { io::write_coloring(coloring, os); });
        out << "classes: " << classes << "\n";
      } else {
        io::write_coloring(coloring, out);
        err << "classes: " << classes << "\n";
      }
      return 0;
    }

    if (*tr) {
      apply_config_file(tr_opts);
      Tournament t = load_tournament(tr_input, in_stream);
      Bitset set(t.size());
      if (tr_oracle) {
        set = oracle::max_transitive_exact(t);
      } else {
        if (tr_pattern.empty())
          fail(ErrorKind::ParseError, "transitive needs --pattern unless --oracle is given");
        PatternInput p = load_pattern(tr_pattern);
        if (!tr_ordering.empty()) p.theta = read_ordering_file(tr_ordering, p.h.size());
        Ordering theta;
        if (p.theta && pat::is_constellation_ordering(p.h, *p.theta)) {
          theta = *p.theta;
        } else {
          auto found = pat::find_constellation_ordering(p.h);
          if (!found) fail(ErrorKind::NotConstellation, "pattern is not a constellation");
          theta = *found;
        }
        engine::ColorConfig cfg = to_config(tr_opts, theta);
        set = engine::detail::extract_class(t, p.h, theta, cfg, 0);
      }
      bool first = true;
      for (auto v : set.to_vector()) {
        out << (first ? "" : " ") << v;
        first = false;
      }
      out << "\n";
      return 0;
    }

    if (*ver) {
      Tournament t = io::read_tournament_file(ver_tournament);
      std::ifstream cf(ver_coloring, std::ios::binary);
      if (!cf) fail(ErrorKind::ParseError, "cannot open '" + ver_coloring + "'");
      Coloring coloring = io::read_coloring(cf, t.size());
      bool ok = verify_coloring(t, coloring);
      out << (ok ? "proper" : "improper") << "\n";
      return ok ? 0 : 1;
    }

    if (*vseq) {
      Tournament t = io::read_tournament_file(vs_tournament);
      std::ifstream sf(vs_sequence, std::ios::binary);
      if (!sf) fail(ErrorKind::ParseError, "cannot open '" + vs_sequence + "'");
      seq::Sequence s = io::read_sequence(sf, t.size());
      seq::Params p{seq::SizeCoeff(parse_rat(vs_c)), parse_rat(vs_lambda), parse_rat(vs_eps)};
      seq::Report rep = vs_smooth ? seq::validate_smooth(t, s, p) : seq::validate_sequence(t, s, p);
      bool ok = rep.ok;
      for (const auto& v : rep.violations) out << "violation: " << v << "\n";
      if (!vs_M.empty() && !seq::validate_M_big(s, parse_rat(vs_M))) {
        ok = false;
        out << "violation: sequence not M-big at M=" << vs_M << "\n";
      }
      if (!vs_strong.empty()) {
        std::vector<std::size_t> index_set;
        std::istringstream is(vs_strong);
        std::string tok;
        while (std::getline(is, tok, ',')) index_set.push_back(std::stoul(tok));
        if (!seq::validate_strong(t, s, index_set)) {
          ok = false;
          out << "violation: sequence not strong at the given index set\n";
        }
      }
      out << (ok ? "valid" : "invalid") << "\n";
      return ok ? 0 : 1;
    }

    if (*bench) {
      apply_config_file(bench_opts);
      PatternInput p = load_pattern(bench_pattern);
      auto stamp = [&, last = std::chrono::steady_clock::now()](const std::string& what) mutable {
        auto now = std::chrono::steady_clock::now();
        auto ms = std::chrono::duration_cast<std::chrono::microseconds>(now - last).count();
        last = now;
        err << what << ": " << (ms / 1000.0) << " ms\n";
      };
      Tournament t = random_tournament(bench_n, bench_seed);
      stamp("gen");
      out << "gen ok (n=" << bench_n << ")\n";
      auto found = p.theta && pat::is_constellation_ordering(p.h, *p.theta)
                       ? p.theta
                       : pat::find_constellation_ordering(p.h);
      stamp("recognize");
      out << "recognize ok (" << (found ? "constellation" : "not a constellation") << ")\n";
      engine::ColorConfig cfg = to_config(bench_opts, found);
      try {
        auto lres = engine::find_l_sequence(t, p.h, cfg.lambda, cfg.k);
        stamp("find-l-sequence");
        out << "find-l-sequence ok ("
            << (lres.sequence ? "sequence of " + std::to_string(lres.sequence->elements.size())
                              : "embedding certificate")
            << ")\n";
      } catch (const Error& e) {
        stamp("find-l-sequence");
        out << "find-l-sequence skipped (" << e.what() << ")\n";
      }
      if (found) {
        auto res = engine::color_h_free(p.h, t, cfg);
        stamp("color");
        out << "color ok (" << res.classes << " classes)\n";
      }
      if (bench_n <= 20) {
        oracle::max_transitive_exact(t);
        stamp("oracle-max-transitive");
        out << "oracle-max-transitive ok\n";
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 1;
}

}  // namespace stellar::cli
