#include "genraven/cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "genraven/errors.hpp"
#include "genraven/eval.hpp"
#include "genraven/gen.hpp"
#include "genraven/io.hpp"
#include "genraven/mem.hpp"
#include "genraven/rules.hpp"
#include "genraven/solver.hpp"
#include "parallel.hpp"

namespace genraven::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A data problem already prefixed with the file it came from.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Sample> load(const std::string& path) {
  try {
    return read_dataset(path);
  } catch (const Error& e) {
    throw DataError(path + ": " + e.what());
  }
}

constexpr std::uint64_t kChunk = 1 << 15;

std::vector<RuleId> parse_rule_list(const std::string& text, const std::string& flag) {
  std::vector<RuleId> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (item.empty()) continue;
    const auto r = RuleId::parse(item);
    if (!r) throw UsageError(flag + ": unknown rule \"" + item + "\"");
    out.push_back(*r);
  }
  return out;
}

std::vector<RuleId> parse_holdout(const std::string& text) {
  if (text == "default") return default_held_out();
  if (text == "none" || text.empty()) return {};
  return parse_rule_list(text, "--holdout");
}

RuleSet to_set(const std::vector<RuleId>& rules) {
  RuleSet s;
  for (RuleId r : rules) s.insert(r);
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot create " + path);
  out << text;
  if (!out) throw FormatError("write failed for " + path);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

DatasetFormat parse_format(const std::string& name, const std::string& path) {
  if (name == "binary" || name == "grvn") return DatasetFormat::Binary;
  if (name == "jsonl") return DatasetFormat::Jsonl;
  if (name == "auto") return ends_with(path, ".jsonl") ? DatasetFormat::Jsonl : DatasetFormat::Binary;
  throw UsageError("unknown format \"" + name + "\"");
}

std::string slot_text(const Slot& s) {
  if (s.is_empty()) return "  .  ";
  std::string out;
  for (Attribute a : kAttributes) {
    if (!out.empty()) out += ',';
    const int v = s.get(a);
    out += (v >= 0 && v <= 9) ? std::to_string(v) : std::string("?");
  }
  return out;
}

void print_sample(std::ostream& out, const Sample& s, std::uint64_t index) {
  out << "sample " << index << "  label: " << (s.label ? s.label->name() : "(none)")
      << "  slots: shape,size,color\n";
  const SharedRules shared = shared_rules(s);
  for (int r = 0; r < kRowsPerSample; ++r) {
    out << "row " << (r + 1) << "\n";
    for (int line = 0; line < 3; ++line) {
      out << "  ";
      for (int p = 0; p < kPanelsPerRow; ++p) {
        if (p > 0) out << " | ";
        for (int col = 0; col < 3; ++col) {
          if (col > 0) out << ' ';
          out << slot_text(s.rows[r].panels[p].slots[line * 3 + col]);
        }
      }
      out << "\n";
    }
    const Row& row = s.rows[r];
    out << "  rules: " << (shared.per_row[r].empty() ? "(none)" : shared.per_row[r].to_string());
    if (!row.structurally_valid()) out << "  [malformed]";
    out << "\n";
  }
  out << "shared: " << (shared.all_shared.empty() ? "(none)" : shared.all_shared.to_string())
      << "  C2: " << (shared.c2() ? "yes" : "no") << "  C3: " << (shared.c3() ? "yes" : "no")
      << "\n";
  if (s.label) {
    out << "label in every row: "
        << (shared.all_shared.contains(*s.label) ? "yes" : "no") << "\n";
  }
}

struct GenArgs {
  std::uint64_t seed = 0;
  std::uint64_t n_per_rule = 0;
  std::string rules = "all";
  std::string holdout = "default";
  std::string split = "train";
  std::string out;
  std::string manifest;
  std::string format = "auto";
  unsigned workers = 0;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  GenConfig cfg;
  cfg.seed = a.seed;
  cfg.samples_per_rule = a.n_per_rule;
  cfg.rules = a.rules == "all" ? std::vector<RuleId>{} : parse_rule_list(a.rules, "--rules");
  cfg.held_out = parse_holdout(a.holdout);
  cfg.workers = a.workers;
  if (a.split == "train") {
    cfg.split = Split::Train;
  } else if (a.split == "test") {
    cfg.split = Split::Test;
  } else if (a.split == "control") {
    cfg.split = Split::Control;
  } else {
    throw UsageError("--split must be train, test or control");
  }
  const DatasetManifest manifest = make_manifest(cfg);
  const DatasetFormat format = parse_format(a.format, a.out);
  if (format == DatasetFormat::Binary) {
    GrvnWriter writer(a.out);
    for (std::uint64_t b = 0; b < manifest.sample_count; b += kChunk) {
      writer.append(generate_range(cfg, b, b + kChunk));
    }
    writer.close();
  } else {
    std::ofstream file(a.out, std::ios::binary | std::ios::trunc);
    if (!file) throw FormatError("cannot create " + a.out);
    for (std::uint64_t b = 0; b < manifest.sample_count; b += kChunk) {
      file << encode_jsonl(generate_range(cfg, b, b + kChunk));
    }
    if (!file) throw FormatError("write failed for " + a.out);
  }
  const std::string manifest_path = a.manifest.empty() ? a.out + ".manifest.json" : a.manifest;
  write_manifest(manifest, manifest_path);
  out << "wrote " << manifest.sample_count << " samples (" << manifest.rules.size() << " rules x "
      << cfg.samples_per_rule << ", split " << manifest.split << ") to " << a.out << "\n"
      << "manifest: " << manifest_path << "\n";
  return kOk;
}

struct ConsistencyArgs {
  std::string samples;
  std::string report;
  std::string csv;
  unsigned workers = 0;
};

int cmd_eval_consistency(const ConsistencyArgs& a, std::ostream& out) {
  const auto samples = load(a.samples);
  const ConsistencyReport r = consistency_report(samples, a.workers);
  write_text(a.report, to_json(r));
  if (!a.csv.empty()) write_text(a.csv, to_csv(r));
  out << std::setprecision(6) << "samples " << r.n_samples << "  valid rows "
      << r.valid_row_fraction << "  C2 " << r.c2_fraction << "  C3 " << r.c3_fraction << "\n";
  return kOk;
}

struct CompletionArgs {
  std::string tests;
  std::string completions;
  std::string holdout = "default";
  std::string report;
  std::string csv;
};

int cmd_eval_completion(const CompletionArgs& a, std::ostream& out) {
  const auto tests = load(a.tests);
  const auto completions = load(a.completions);
  const RuleSet held_out = to_set(parse_holdout(a.holdout));
  CompletionReport r;
  try {
    r = completion_report(tests, completions, held_out);
  } catch (const TestCaseError& e) {
    throw DataError(a.tests + ": " + e.what());
  } catch (const AlignmentError& e) {
    throw DataError(a.tests + " vs " + a.completions + ": " + e.what());
  }
  write_text(a.report, to_json(r));
  if (!a.csv.empty()) write_text(a.csv, to_csv(r));
  out << std::setprecision(6) << "tests " << r.n_tests << "  accuracy " << r.overall_accuracy;
  if (r.trained_accuracy) out << "  trained " << *r.trained_accuracy;
  if (r.held_out_accuracy) out << "  held-out " << *r.held_out_accuracy;
  out << "\n";
  return kOk;
}

struct CompleteArgs {
  std::string tests;
  std::string strategy = "first";
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "auto";
  unsigned workers = 0;
};

int cmd_complete(const CompleteArgs& a, std::ostream& out) {
  CompletionStrategy strategy;
  if (a.strategy == "first") {
    strategy = CompletionStrategy::First;
  } else if (a.strategy == "random") {
    strategy = CompletionStrategy::Random;
  } else {
    throw UsageError("--strategy must be first or random");
  }
  auto samples = load(a.tests);
  detail::parallel_for(samples.size(), a.workers, [&](std::size_t i) {
    CounterRng rng = completion_stream(a.seed, i);
    try {
      const CompletionResult res =
          complete_panel(CompletionContext::from_sample(samples[i]), strategy, rng);
      samples[i].panel(kPanelsPerSample - 1) = res.panel9;
    } catch (const InvalidContext& e) {
      throw InvalidContext(a.tests + ": test " + std::to_string(i) + ": " + e.what());
    } catch (const NoSharedRule& e) {
      throw NoSharedRule(a.tests + ": test " + std::to_string(i) + ": " + e.what());
    } catch (const AllInfeasible& e) {
      throw AllInfeasible(a.tests + ": test " + std::to_string(i) + ": " + e.what());
    }
  });
  write_dataset(samples, a.out, parse_format(a.format, a.out));
  out << "completed " << samples.size() << " tests -> " << a.out << "\n";
  return kOk;
}

struct MemArgs {
  std::string generated;
  std::string train;
  std::string control;
  std::string report;
  std::string csv;
  unsigned workers = 0;
};

int cmd_mem(const MemArgs& a, std::ostream& out) {
  const auto generated = load(a.generated);
  const auto train = MemorizationIndex::build(load(a.train));
  std::optional<MemorizationIndex> control;
  if (!a.control.empty()) control = MemorizationIndex::build(load(a.control));
  const MemReport r =
      memorization_report(generated, train, control ? &*control : nullptr, a.workers);
  write_text(a.report, to_json(r));
  if (!a.csv.empty()) write_text(a.csv, to_csv(r));
  out << std::setprecision(6) << "generated " << r.n_generated;
  for (MemLevel l : kMemLevels) out << "  " << mem_level_name(l) << " " << r.train[l].fraction;
  out << "\n";
  return kOk;
}

struct InspectArgs {
  std::string file;
  std::uint64_t index = 0;
};

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  Sample s;
  if (detect_format(a.file) == DatasetFormat::Binary) {
    try {
      GrvnReader reader(a.file);
      if (a.index >= reader.size()) {
        throw UsageError("--index " + std::to_string(a.index) + " out of range (" + a.file +
                         " has " + std::to_string(reader.size()) + " samples)");
      }
      s = reader.read(a.index);
    } catch (const Error& e) {
      throw DataError(a.file + ": " + e.what());
    }
  } else {
    const auto samples = load(a.file);
    if (a.index >= samples.size()) {
      throw UsageError("--index " + std::to_string(a.index) + " out of range (" + a.file +
                       " has " + std::to_string(samples.size()) + " samples)");
    }
    s = samples[a.index];
  }
  print_sample(out, s, a.index);
  return kOk;
}

struct ExportArgs {
  std::string file;
  std::string to = "jsonl";
  std::string out;
};

int cmd_export(const ExportArgs& a, std::ostream& out) {
  const auto samples = load(a.file);
  write_dataset(samples, a.out, parse_format(a.to, a.out));
  out << "exported " << samples.size() << " samples to " << a.out << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GenRAVEN dataset synthesis, rule checking and evaluation", "genraven"};
  app.require_subcommand(1);
  std::function<int()> action;

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a dataset and its manifest");
  g->add_option("--seed", gen.seed, "Master seed");
  g->add_option("--n-per-rule", gen.n_per_rule, "Samples per rule")->required();
  g->add_option("--rules", gen.rules, "all or comma-separated rule names");
  g->add_option("--holdout", gen.holdout, "default, none or comma-separated rule names");
  g->add_option("--split", gen.split, "train, test or control");
  g->add_option("--out", gen.out, "Output dataset file")->required();
  g->add_option("--manifest", gen.manifest, "Manifest path (default: <out>.manifest.json)");
  g->add_option("--format", gen.format, "auto, binary or jsonl");
  g->add_option("--workers", gen.workers, "Worker threads (0 = all cores)");
  g->callback([&] { action = [&] { return cmd_gen(gen, out); }; });

  auto* ev = app.add_subcommand("eval", "Score samples or completions");
  ev->require_subcommand(1);
  ConsistencyArgs cons;
  auto* ec = ev->add_subcommand("consistency", "Valid-row, C2 and C3 fractions");
  ec->add_option("--samples", cons.samples)->required();
  ec->add_option("--report", cons.report, "JSON report path")->required();
  ec->add_option("--per-rule-csv", cons.csv, "Per-rule CSV path");
  ec->add_option("--workers", cons.workers);
  ec->callback([&] { action = [&] { return cmd_eval_consistency(cons, out); }; });

  CompletionArgs comp;
  auto* ep = ev->add_subcommand("completion", "Panel-completion accuracy");
  ep->add_option("--tests", comp.tests)->required();
  ep->add_option("--completions", comp.completions)->required();
  ep->add_option("--holdout", comp.holdout, "default, none or comma-separated rule names");
  ep->add_option("--report", comp.report, "JSON report path")->required();
  ep->add_option("--per-rule-csv", comp.csv, "Per-rule CSV path");
  ep->callback([&] { action = [&] { return cmd_eval_completion(comp, out); }; });

  CompleteArgs complete;
  auto* c = app.add_subcommand("complete", "Oracle completion of the ninth panel");
  c->add_option("--tests", complete.tests)->required();
  c->add_option("--strategy", complete.strategy, "first or random");
  c->add_option("--seed", complete.seed);
  c->add_option("--out", complete.out)->required();
  c->add_option("--format", complete.format, "auto, binary or jsonl");
  c->add_option("--workers", complete.workers);
  c->callback([&] { action = [&] { return cmd_complete(complete, out); }; });

  MemArgs mem;
  auto* m = app.add_subcommand("mem", "Exact-copy memorization rates");
  m->add_option("--generated", mem.generated)->required();
  m->add_option("--train", mem.train)->required();
  m->add_option("--control", mem.control);
  m->add_option("--report", mem.report, "JSON report path")->required();
  m->add_option("--csv", mem.csv, "Per-level CSV path");
  m->add_option("--workers", mem.workers);
  m->callback([&] { action = [&] { return cmd_mem(mem, out); }; });

  InspectArgs inspect;
  auto* i = app.add_subcommand("inspect", "Print one sample and its rule sets");
  i->add_option("--file", inspect.file)->required();
  i->add_option("--index", inspect.index);
  i->callback([&] { action = [&] { return cmd_inspect(inspect, out); }; });

  ExportArgs exp;
  auto* x = app.add_subcommand("export", "Convert between GRVN and JSONL");
  x->add_option("--file", exp.file)->required();
  x->add_option("--to", exp.to, "jsonl or binary");
  x->add_option("--out", exp.out)->required();
  x->callback([&] { action = [&] { return cmd_export(exp, out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const GenerationFailure& e) {
    err << "generation failed: " << e.what() << "\n";
    return kGenerationFailure;
  } catch (const InfeasibleError& e) {
    err << "generation failed: " << e.what() << "\n";
    return kGenerationFailure;
  } catch (const InvalidContext& e) {
    err << "completion failed: " << e.what() << "\n";
    return kGenerationFailure;
  } catch (const NoSharedRule& e) {
    err << "completion failed: " << e.what() << "\n";
    return kGenerationFailure;
  } catch (const AllInfeasible& e) {
    err << "completion failed: " << e.what() << "\n";
    return kGenerationFailure;
  } catch (const Error& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::out_of_range& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace genraven::cli
