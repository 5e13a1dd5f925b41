#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pinch/amalgam.hpp"
#include "pinch/generic.hpp"
#include "pinch/pipeline.hpp"

using namespace pinch;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfig = 2;

fs::path default_out_dir() {
  for (const char* var : {"PINCH_OUT_DIR", "AMALGAM_OUT_DIR"}) {
    if (const char* v = std::getenv(var); v && *v) return v;
  }
  return "pinch-out";
}

const Alphabet& alphabet_for(const std::string& factor) { return factor == "h" ? kAlphabetH : kAlphabetG; }

std::string census_text(const Census& c) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [size, count] : c) {
    out << (first ? "" : " ") << size << ":" << count;
    first = false;
  }
  return out.str();
}

std::string move_text(const NielsenMove& m, const Alphabet& a) {
  auto gen = [&](int i) { return format_letter(Letter{i, 1}, a); };
  switch (m.kind) {
    case NielsenMove::Kind::Invert:
      return gen(m.i) + " -> " + gen(m.i) + "^-1";
    case NielsenMove::Kind::Swap:
      return gen(m.i) + " <-> " + gen(m.j);
    case NielsenMove::Kind::Multiply: {
      const std::string t = gen(m.j) + (m.sign < 0 ? "^-1" : "");
      return gen(m.i) + " -> " + (m.side == NielsenMove::Side::Right ? gen(m.i) + " " + t : t + " " + gen(m.i));
    }
  }
  return {};
}

// Factor snapshots carry their own word; the alphabet is whichever parses it.
GenericBuilder load_factor(const fs::path& p, const Alphabet** used = nullptr) {
  const auto j = read_json_file(p);
  for (const Alphabet* a : {&kAlphabetG, &kAlphabetH}) {
    try {
      parse_word(j.at("c").get<std::string>(), *a);
    } catch (const std::exception&) {
      continue;
    }
    if (used) *used = a;
    return factor_from_snapshot(j, *a);
  }
  throw PreconditionError(p.string() + ": snapshot word does not parse");
}

int print_checks(const std::vector<Check>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    ok = ok && c.ok;
  }
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-stage builder for actions of amalgamated free groups"};
  app.require_subcommand(1);

  // word
  auto* word = app.add_subcommand("word", "free group word utilities");
  word->require_subcommand(1);
  std::string word_text;
  std::string word_factor = "g";
  int word_rank = 0;
  auto add_word_args = [&](CLI::App* sub) {
    sub->add_option("word", word_text, "word, e.g. \"a1 b a1^-1 b^-1\"")->required();
    sub->add_option("--factor", word_factor, "alphabet: g (a1.., b) or h (x1.., b)")
        ->check(CLI::IsMember({"g", "h"}));
  };
  auto* w_reduce = word->add_subcommand("reduce", "free reduction");
  auto* w_cyclic = word->add_subcommand("cyclic", "cyclic reduction and conjugator");
  auto* w_sums = word->add_subcommand("sums", "exponent sums per generator");
  auto* w_zero = word->add_subcommand("autzero", "automorphism making some exponent sum zero");
  for (auto* sub : {w_reduce, w_cyclic, w_sums, w_zero}) add_word_args(sub);
  for (auto* sub : {w_sums, w_zero}) sub->add_option("--rank", word_rank, "number of alpha generators");

  // build / verify
  auto* build = app.add_subcommand("build", "run the full pipeline from a JSON config");
  std::string config_path;
  std::string out_dir;
  build->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  build->add_option("--out", out_dir, "output directory (default $PINCH_OUT_DIR)");

  auto* verify_cmd = app.add_subcommand("verify", "recompute every check from stored outputs");
  std::string dir;
  verify_cmd->add_option("--dir", dir, "output directory (default $PINCH_OUT_DIR)");

  // factor inspection
  auto* orbits = app.add_subcommand("orbits", "c-orbit census of a factor snapshot");
  std::string snapshot;
  orbits->add_option("--snapshot", snapshot, "g_action.json or h_action.json")->required()->check(CLI::ExistingFile);

  auto* folner = app.add_subcommand("folner", "boundary ratios of a finite interval");
  std::string set_text;
  std::string probe;
  folner->add_option("--snapshot", snapshot, "factor snapshot")->required()->check(CLI::ExistingFile);
  folner->add_option("--set", set_text, "interval lo:hi")->required();
  folner->add_option("--word", probe, "probe word (default: every generator)");

  auto* sigma = app.add_subcommand("sigma", "intertwiner summary");
  sigma->add_option("--dir", dir, "output directory (default $PINCH_OUT_DIR)");

  auto* exp = app.add_subcommand("export", "Schreier graph of a factor snapshot");
  std::string format = "dot";
  std::string out_path;
  bool explicit_beta = false;
  exp->add_option("--snapshot", snapshot, "factor snapshot")->required()->check(CLI::ExistingFile);
  exp->add_option("--format", format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  exp->add_option("--out", out_path, "output file (default stdout)");
  exp->add_flag("--explicit-beta", explicit_beta, "draw beta edges");

  auto* preset = app.add_subcommand("preset", "emit a ready-made config");
  preset->require_subcommand(1);
  auto* surface = preset->add_subcommand("surface", "surface group of genus g");
  int genus = 2;
  surface->add_option("--genus", genus, "genus, at least 2")->check(CLI::Range(2, 64));
  surface->add_option("--out", out_path, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (word->parsed()) {
      const Alphabet& a = alphabet_for(word_factor);
      const Word w = parse_word(word_text, a);
      if (w_reduce->parsed()) {
        std::cout << format_word(free_reduce(w), a) << "\n";
      } else if (w_cyclic->parsed()) {
        const auto cr = cyclic_reduce(w);
        std::cout << "core " << format_word(cr.core, a) << "\nconjugator " << format_word(cr.conjugator, a) << "\n";
      } else {
        int rank = word_rank;
        for (const auto& l : w.letters()) rank = std::max(rank, l.gen);
        const auto sums = abelianize(w, rank + 1);
        if (w_sums->parsed()) {
          for (int g = 0; g <= rank; ++g) std::cout << format_letter(Letter{g, 1}, a) << " " << sums[g] << "\n";
        } else {
          const auto z = zero_sum_automorphism(sums, free_reduce(w));
          for (const auto& m : z.moves) std::cout << move_text(m, a) << "\n";
          std::cout << "image " << format_word(z.image, a) << "\nzero " << format_letter(Letter{z.witness, 1}, a)
                    << "\n";
        }
      }
      return kPass;
    }

    if (build->parsed()) {
      const auto config = config_from_json(read_json_file(config_path));
      const auto r = run_pipeline(config);
      const fs::path where = out_dir.empty() ? default_out_dir() : fs::path(out_dir);
      write_outputs(r, where);
      std::cout << "wrote " << where.string() << "\n";
      return print_checks(r.checks);
    }

    if (verify_cmd->parsed()) {
      const auto r = load_outputs(dir.empty() ? default_out_dir() : fs::path(dir));
      return print_checks(verify(r));
    }

    if (orbits->parsed()) {
      const auto b = load_factor(snapshot);
      std::cout << census_text(orbit_census(b.action(), b.c(), b.window())) << "\n";
      return all_orbits_finite(b.action(), b.c(), b.window()) ? kPass : kFail;
    }

    if (folner->parsed()) {
      const Alphabet* a = nullptr;
      const auto b = load_factor(snapshot, &a);
      const auto colon = set_text.find(':');
      if (colon == std::string::npos) throw ConfigError("--set expects lo:hi");
      const Interval in{std::stoll(set_text.substr(0, colon)), std::stoll(set_text.substr(colon + 1))};
      if (in.hi < in.lo) throw ConfigError("--set: empty interval");
      std::vector<Word> probes;
      if (!probe.empty()) {
        probes.push_back(parse_word(probe, *a));
      } else {
        for (int g = 0; g <= b.state().rank(); ++g) probes.push_back(Word({Letter{g, 1}}));
      }
      const auto points = interval_points(in);
      for (const auto& p : probes) {
        const auto r = folner_ratio(b.action(), points, p);
        std::cout << format_word(p, *a) << " " << r.num << "/" << r.den << "\n";
      }
      return kPass;
    }

    if (sigma->parsed()) {
      const auto r = load_outputs(dir.empty() ? default_out_dir() : fs::path(dir));
      const auto ga = r.g->action();
      const auto ha = r.h->action();
      const auto f = factor_pair(r, ga, ha);
      const Interval window{std::min(f.h_window.lo, f.g_window.lo), std::max(f.h_window.hi, f.g_window.hi)};
      const auto bad = intertwining_violations(r.sigma, f, window);
      std::cout << "moved points " << r.sigma.permutation().moved().size() << "\n"
                << "orbit matches " << r.sigma.orbit_matches().size() << "\n"
                << "protected points " << r.sigma.forbidden().size() << "\n"
                << "intertwining violations " << bad.size() << " on " << window.size() << " points\n";
      return bad.empty() ? kPass : kFail;
    }

    if (exp->parsed()) {
      const Alphabet* a = nullptr;
      const auto b = load_factor(snapshot, &a);
      const std::string text = format == "dot" ? export_dot(b.state(), explicit_beta, *a)
                                               : export_json(b.state(), explicit_beta, *a).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path);
        if (!(out << text)) throw std::runtime_error("cannot write " + out_path);
      }
      return kPass;
    }

    if (surface->parsed()) {
      const std::string text = config_to_json(surface_preset(genus)).dump(2) + "\n";
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(out_path);
        if (!(out << text)) throw std::runtime_error("cannot write " + out_path);
      }
      return kPass;
    }
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return kFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kPass;
}
