#include "posmon/cli.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "posmon/classifier.hpp"
#include "posmon/error.hpp"
#include "posmon/factor.hpp"
#include "posmon/gallery.hpp"
#include "posmon/witness.hpp"

namespace posmon {

namespace {

struct Options {
  bool json = false;
  std::size_t depth = kDefaultDepth;
  std::string instance;
  std::string element;
  std::string property;
  std::string bound;
  std::string file;
  std::string entry;
  std::size_t steps = 5;
  std::size_t max_count = kDefaultMaxFactorizations;
  bool run_all = false;
  unsigned jobs = 1;
};

std::string format_factorization(const Factorization& f) {
  std::string out;
  for (std::size_t i = 0; i < f.atoms.size(); ++i) {
    if (!out.empty()) out += " + ";
    if (f.mults[i] != 1) out += f.mults[i].get_str() + "*";
    out += "[" + element_short(f.atoms[i]) + "]";
  }
  return (out.empty() ? "0" : out) + "  (length " + f.length.get_str() + ")";
}

std::string format_lengths(const std::set<Integer>& ls) {
  std::string out;
  for (const auto& l : ls) out += (out.empty() ? "" : ", ") + l.get_str();
  return "{" + out + "}";
}

void print_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

int cmd_atoms(const Options& o, std::ostream& out) {
  const auto m = MonoidDescriptor::parse(o.instance);
  const auto set = atoms(m, o.depth);
  if (o.json) {
    print_json(out, set.to_json());
    return kExitOk;
  }
  out << "Atoms(" << m.to_string() << ") = {";
  for (std::size_t i = 0; i < set.atoms.size(); ++i) out << (i ? ", " : "") << element_short(set.atoms[i]);
  out << "}\n";
  if (set.complete) {
    out << "complete\n";
  } else if (set.exhaustive_below) {
    out << "window depth " << o.depth << ", exhaustive up to " << element_short(*set.exhaustive_below) << '\n';
  } else {
    out << "window depth " << o.depth << ", closed-form atoms only\n";
  }
  return kExitOk;
}

int cmd_factorize(const Options& o, std::ostream& out) {
  const auto m = MonoidDescriptor::parse(o.instance);
  const auto b = GroupElement::parse(m.group(), o.element);
  const auto list = factorizations(m, b, o.depth, o.max_count);
  if (o.json) {
    print_json(out, list.to_json());
    return kExitOk;
  }
  out << "Z(" << element_short(b) << "): " << list.items.size() << " factorization"
      << (list.items.size() == 1 ? "" : "s") << (list.complete ? "" : " (window only)") << '\n';
  for (const auto& f : list.items) out << "  " << format_factorization(f) << '\n';
  if (list.truncated) out << "truncated at " << o.max_count << '\n';
  if (!list.note.empty()) out << "note: " << list.note << '\n';
  return kExitOk;
}

int cmd_lengths(const Options& o, std::ostream& out) {
  const auto m = MonoidDescriptor::parse(o.instance);
  const auto b = GroupElement::parse(m.group(), o.element);
  const auto ls = length_set(m, b, o.depth);
  if (o.json) {
    print_json(out, ls.to_json());
    return kExitOk;
  }
  out << "L(" << element_short(b) << ") = " << format_lengths(ls.lengths) << (ls.complete ? "" : " (window only)") << '\n';
  return kExitOk;
}

int cmd_contains(const Options& o, std::ostream& out) {
  const auto m = MonoidDescriptor::parse(o.instance);
  const auto x = GroupElement::parse(m.group(), o.element);
  const auto v = contains(m, x, o.depth);
  if (o.json) {
    nlohmann::json j = {{"element", x.to_string()}, {"status", to_string(v.status)}, {"depth", v.depth}};
    if (v.certificate) j["certificate"] = v.certificate->to_json();
    print_json(out, j);
  } else {
    out << element_short(x) << ": " << to_string(v.status) << '\n';
  }
  return kExitOk;
}

int cmd_classify(const Options& o, std::ostream& out) {
  const auto m = MonoidDescriptor::parse(o.instance);
  const auto report = classify_known(m, o.depth);
  const bool ok = report.chain_ok && check_chain_consistency(report);
  if (o.json) {
    print_json(out, report.to_json());
  } else {
    out << report.instance << '\n';
    for (const auto p : kAllProperties) {
      const auto& v = report.at(p);
      out << "  " << to_string(p) << std::string(6 - to_string(p).size(), ' ') << to_string(v.status);
      if (!v.source.empty()) out << "  [" << v.source << "]";
      if (!v.bound.empty()) out << "  bound " << v.bound;
      out << '\n';
    }
    if (!report.atoms.empty()) {
      out << "  Atoms (window):";
      for (const auto& a : report.atoms) out << ' ' << a;
      out << '\n';
    }
    out << "  chain " << (ok ? "consistent" : "INCONSISTENT") << '\n';
  }
  return ok ? kExitOk : kExitInconsistent;
}

int cmd_probe(const Options& o, std::ostream& out) {
  const auto m = MonoidDescriptor::parse(o.instance);
  const auto prop = parse_probe_property(o.property);
  const auto res = probe_property(m, prop, ProbeBound::parse(o.bound), o.depth);
  if (o.json) {
    print_json(out, res.to_json());
  } else {
    out << to_string(prop) << " below " << o.bound << ": " << to_string(res.status) << " (" << res.members_checked
        << " members checked)\n";
    if (res.counterexample) out << "  counterexample " << element_short(*res.counterexample) << '\n';
    for (const auto& f : res.evidence) out << "    " << format_factorization(f) << '\n';
    if (!res.note.empty()) out << "  note: " << res.note << '\n';
  }
  return res.status == ProbeStatus::Refuted ? kExitRefuted : kExitOk;
}

Rational mq_parameter(const std::string& instance) {
  const auto m = MonoidDescriptor::parse(instance);
  if (m.family() != Family::GeometricPuiseux) throw Unsupported("chains and breaks are built for mq:<q> instances only");
  return m.q();
}

int cmd_chain(const Options& o, std::ostream& out) {
  const auto cert = mq_chain(mq_parameter(o.instance), o.depth);
  const auto replay = replay_chain(cert);
  if (o.json) {
    auto j = cert.to_json();
    j["replay"] = replay.ok;
    print_json(out, j);
  } else {
    for (std::size_t n = 0; n < cert.depth(); ++n) {
      out << "q_" << n << " = " << format_rational(cert.elements[n]) << " = q_" << n + 1 << " + "
          << format_rational(cert.differences[n]) << '\n';
    }
    out << "replay " << (replay.ok ? "ok" : "FAILED: " + replay.detail) << '\n';
  }
  return replay.ok ? kExitOk : kExitInconsistent;
}

int cmd_break(const Options& o, std::ostream& out) {
  const auto cert = synthesize_break(mq_parameter(o.instance), o.steps);
  const auto replay = replay_break(cert);
  if (o.json) {
    auto j = cert.to_json();
    j["replay"] = replay.ok;
    print_json(out, j);
  } else {
    out << "q_0 = " << format_rational(cert.q0) << '\n';
    for (std::size_t k = 0; k < cert.steps.size(); ++k) {
      const auto& s = cert.steps[k];
      out << "a'_" << k + 1 << " = a_" << s.first << " + a_" << s.second << " = " << format_rational(s.atom)
          << "; s'_" << k + 1 << " divides s_" << s.m << "; q_0 excluded after " << s.exclusion.nodes << " nodes\n";
    }
    out << "replay " << (replay.ok ? "ok" : "FAILED: " + replay.detail) << '\n';
  }
  return replay.ok ? kExitOk : kExitInconsistent;
}

int cmd_verify(const Options& o, std::ostream& out) {
  std::ifstream in(o.file);
  if (!in) throw ParseError("cannot open '" + o.file + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad JSON: ") + e.what());
  }
  const auto replay = verify_certificate(j);
  if (o.json) {
    nlohmann::json r = {{"ok", replay.ok}};
    if (!replay.ok) r["detail"] = replay.detail;
    print_json(out, r);
  } else {
    out << (replay.ok ? "OK" : "FAIL: " + replay.detail) << '\n';
  }
  return replay.ok ? kExitOk : kExitInconsistent;
}

void print_entry(std::ostream& out, const EntryResult& r) {
  out << (r.passed() ? "PASS " : "FAIL ") << r.id << '\n';
  if (!r.error.empty()) out << "  error: " << r.error << '\n';
  for (const auto& c : r.checks) {
    if (!c.passed) out << "  failed: " << c.name << (c.detail.empty() ? "" : " (" + c.detail + ")") << '\n';
  }
  if (!r.chain_ok) out << "  implication chain inconsistent\n";
}

int cmd_gallery(const Options& o, std::ostream& out) {
  if (!o.entry.empty()) {
    const auto r = run_entry(gallery_entry(o.entry));
    if (o.json) {
      print_json(out, r.to_json());
    } else {
      print_entry(out, r);
      for (const auto& c : r.checks) out << "  " << (c.passed ? "ok  " : "FAIL") << ' ' << c.name << '\n';
    }
    return r.passed() ? kExitOk : kExitInconsistent;
  }
  if (!o.run_all) {
    if (o.json) {
      auto arr = nlohmann::json::array();
      for (const auto& e : gallery_list()) {
        arr.push_back({{"id", e.id}, {"instance", e.instance}, {"citation", e.citation}, {"recipe", e.recipe}});
      }
      print_json(out, arr);
    } else {
      for (const auto& e : gallery_list()) out << e.id << "  " << e.instance << "  " << e.citation << '\n';
    }
    return kExitOk;
  }
  const auto results = run_gallery(o.jobs);
  const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
  if (o.json) {
    auto arr = nlohmann::json::array();
    for (const auto& r : results) arr.push_back(r.to_json());
    print_json(out, {{"entries", arr}, {"passed", passed}, {"total", results.size()}});
  } else {
    for (const auto& r : results) print_entry(out, r);
    out << passed << '/' << results.size() << " entries passed\n";
  }
  return passed == static_cast<std::ptrdiff_t>(results.size()) ? kExitOk : kExitInconsistent;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact factorization toolkit for positive monoids of ordered groups", "posmon"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", o.json, "Machine-readable JSON output");
  app.add_option("--depth", o.depth, "Generator window depth")->check(CLI::PositiveNumber);

  auto* atoms_cmd = app.add_subcommand("atoms", "List the atoms of an instance");
  atoms_cmd->add_option("instance", o.instance)->required();

  auto* fact_cmd = app.add_subcommand("factorize", "Enumerate Z(b)");
  fact_cmd->add_option("instance", o.instance)->required();
  fact_cmd->add_option("element", o.element)->required();
  fact_cmd->add_option("--max", o.max_count, "Stop after this many factorizations");

  auto* len_cmd = app.add_subcommand("lengths", "Compute L(b)");
  len_cmd->add_option("instance", o.instance)->required();
  len_cmd->add_option("element", o.element)->required();

  auto* cont_cmd = app.add_subcommand("contains", "Decide membership with a certificate");
  cont_cmd->add_option("instance", o.instance)->required();
  cont_cmd->add_option("element", o.element)->required();

  auto* cls_cmd = app.add_subcommand("classify", "Report every factorization property");
  cls_cmd->add_option("instance", o.instance)->required();

  auto* probe_cmd = app.add_subcommand("probe", "Check one property on all members below a bound");
  probe_cmd->add_option("instance", o.instance)->required();
  probe_cmd->add_option("property", o.property, "ATM, BFM, FFM, HFM, LFM or UFM")->required();
  probe_cmd->add_option("--bound", o.bound, "Scalar (60) or box ((4,20))")->required();

  auto* chain_cmd = app.add_subcommand("chain", "Ascending chain of principal ideals in mq:<q>");
  chain_cmd->add_option("instance", o.instance)->required();

  auto* break_cmd = app.add_subcommand("break", "Hereditary-break construction in mq:<q>");
  break_cmd->add_option("instance", o.instance)->required();
  break_cmd->add_option("--steps", o.steps)->check(CLI::PositiveNumber);

  auto* verify_cmd = app.add_subcommand("verify", "Replay a certificate file");
  verify_cmd->add_option("certificate", o.file)->required();

  auto* gallery_cmd = app.add_subcommand("gallery", "List or run the example gallery");
  gallery_cmd->add_flag("--run-all", o.run_all, "Run every entry's recipe");
  gallery_cmd->add_option("--entry", o.entry, "Run one entry");
  gallery_cmd->add_option("--jobs", o.jobs, "Entries run concurrently")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*atoms_cmd) return cmd_atoms(o, out);
    if (*fact_cmd) return cmd_factorize(o, out);
    if (*len_cmd) return cmd_lengths(o, out);
    if (*cont_cmd) return cmd_contains(o, out);
    if (*cls_cmd) return cmd_classify(o, out);
    if (*probe_cmd) return cmd_probe(o, out);
    if (*chain_cmd) return cmd_chain(o, out);
    if (*break_cmd) return cmd_break(o, out);
    if (*verify_cmd) return cmd_verify(o, out);
    if (*gallery_cmd) return cmd_gallery(o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Unsupported& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const GroupMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInconsistent;
  }
  return kExitUsage;
}

}  // namespace posmon
