#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstdio>

#include "genraven/errors.hpp"
#include "genraven/eval.hpp"
#include "genraven/gen.hpp"
#include "genraven/io.hpp"
#include "genraven/manifest.hpp"
#include "genraven/mem.hpp"
#include "genraven/rules.hpp"
#include "genraven/solver.hpp"

namespace py = pybind11;
using namespace genraven;

namespace {

using Grids = py::array_t<std::int8_t, py::array::c_style>;
using Labels = std::vector<std::optional<std::string>>;

RuleId parse_rule(const std::string& name) {
  const auto r = RuleId::parse(name);
  if (!r) throw py::value_error("unknown rule: " + name);
  return *r;
}

std::vector<RuleId> parse_rules(const std::vector<std::string>& names) {
  std::vector<RuleId> out;
  for (const auto& n : names) out.push_back(parse_rule(n));
  return out;
}

// Accepts (N, 3, 9, 9) or a single (3, 9, 9) grid; values outside int8 saturate.
std::vector<Sample> to_samples(const py::array& input, const std::optional<Labels>& labels) {
  const auto arr = py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>::ensure(input);
  if (!arr) throw py::value_error("expected an integer array");
  if (arr.ndim() != 3 && arr.ndim() != 4) throw py::value_error("expected shape (N, 3, 9, 9) or (3, 9, 9)");
  const std::size_t n = arr.ndim() == 4 ? static_cast<std::size_t>(arr.shape(0)) : 1;
  for (int d = arr.ndim() - 3, k = 0; k < 3; ++d, ++k) {
    if (arr.shape(d) != (k == 0 ? 3 : 9)) throw py::value_error("expected shape (N, 3, 9, 9) or (3, 9, 9)");
  }
  if (labels && labels->size() != n) throw py::value_error("labels and grids differ in length");
  std::vector<Sample> out(n);
  const std::int64_t* data = arr.data();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = decode_sample(std::span<const std::int64_t>(data + i * kGridSize, kGridSize)).sample;
    if (labels && (*labels)[i]) out[i].label = parse_rule(*(*labels)[i]);
  }
  return out;
}

Grids to_grids(std::span<const Sample> samples) {
  Grids out({static_cast<py::ssize_t>(samples.size()), py::ssize_t{3}, py::ssize_t{9}, py::ssize_t{9}});
  std::int8_t* data = out.mutable_data();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Grid g = encode_sample(samples[i]);
    std::copy(g.begin(), g.end(), data + i * kGridSize);
  }
  return out;
}

Labels labels_of(std::span<const Sample> samples) {
  Labels out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(s.label ? std::optional(s.label->name()) : std::nullopt);
  return out;
}

std::vector<std::string> names(RuleSet s) {
  std::vector<std::string> out;
  for (RuleId r : s.members()) out.push_back(r.name());
  return out;
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  if (s == "control") return Split::Control;
  throw py::value_error("split must be train, test or control");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "GenRAVEN dataset generation, rule checking and evaluation";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<FormatError>(m, "FormatError", m.attr("Error").ptr());
  py::register_exception<GenerationFailure>(m, "GenerationFailure", m.attr("Error").ptr());

  m.def("rule_inventory", [] {
    std::vector<std::string> out;
    for (RuleId r : rule_inventory()) out.push_back(r.name());
    return out;
  });
  m.def("inventory_digest", [] {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(inventory_digest(canonical_inventory_names())));
    return std::string(buf);
  });
  m.def("default_held_out", [] {
    std::vector<std::string> out;
    for (RuleId r : default_held_out()) out.push_back(r.name());
    return out;
  });

  m.def(
      "applicable_rules",
      [](const py::array& grid) {
        const Sample s = to_samples(grid, std::nullopt).at(0);
        std::vector<std::vector<std::string>> out;
        for (const Row& row : s.rows) out.push_back(names(applicable_rules(row)));
        return out;
      },
      py::arg("grid"), "Rules obeyed by each of the three rows of one (3, 9, 9) sample.");
  m.def(
      "shared_rules", [](const py::array& grid) { return names(shared_rules(to_samples(grid, std::nullopt).at(0)).all_shared); },
      py::arg("grid"));

  m.def(
      "generate",
      [](std::uint64_t seed, std::uint64_t n_per_rule, const std::string& split,
         std::optional<std::vector<std::string>> rules, std::optional<std::vector<std::string>> held_out,
         unsigned workers) {
        GenConfig cfg;
        cfg.seed = seed;
        cfg.samples_per_rule = n_per_rule;
        cfg.split = parse_split(split);
        if (rules) cfg.rules = parse_rules(*rules);
        if (held_out) cfg.held_out = parse_rules(*held_out);
        cfg.workers = workers;
        Dataset d;
        {
          py::gil_scoped_release release;
          d = generate_dataset(cfg);
        }
        return py::make_tuple(to_grids(d.samples), labels_of(d.samples), manifest_to_json(d.manifest));
      },
      py::arg("seed"), py::arg("n_per_rule"), py::arg("split") = "train", py::arg("rules") = py::none(),
      py::arg("held_out") = py::none(), py::arg("workers") = 0);

  m.def(
      "consistency_report",
      [](const py::array& grids, unsigned workers) {
        const auto samples = to_samples(grids, std::nullopt);
        py::gil_scoped_release release;
        return to_json(consistency_report(samples, workers));
      },
      py::arg("grids"), py::arg("workers") = 0);

  m.def(
      "complete",
      [](const py::array& grids, const std::string& strategy, std::uint64_t seed) {
        if (strategy != "first" && strategy != "random") throw py::value_error("strategy must be first or random");
        auto samples = to_samples(grids, std::nullopt);
        for (std::size_t i = 0; i < samples.size(); ++i) {
          CounterRng rng = completion_stream(seed, i);
          samples[i].panel(8) =
              complete_panel(CompletionContext::from_sample(samples[i]),
                             strategy == "first" ? CompletionStrategy::First : CompletionStrategy::Random, rng)
                  .panel9;
        }
        return to_grids(samples);
      },
      py::arg("grids"), py::arg("strategy") = "first", py::arg("seed") = 0,
      "Fills panel 9 of every sample from its first eight panels.");

  m.def(
      "completion_report",
      [](const py::array& tests, const Labels& labels, const py::array& completions,
         std::optional<std::vector<std::string>> held_out) {
        const auto t = to_samples(tests, labels);
        const auto c = to_samples(completions, std::nullopt);
        RuleSet held;
        for (RuleId r : held_out ? parse_rules(*held_out) : default_held_out()) held.insert(r);
        return to_json(completion_report(t, c, held));
      },
      py::arg("tests"), py::arg("labels"), py::arg("completions"), py::arg("held_out") = py::none());

  m.def(
      "memorization_report",
      [](const py::array& generated, const py::array& train, std::optional<py::array> control, unsigned workers) {
        const auto g = to_samples(generated, std::nullopt);
        const auto t = to_samples(train, std::nullopt);
        std::optional<std::vector<Sample>> c;
        if (control) c = to_samples(*control, std::nullopt);
        py::gil_scoped_release release;
        const auto train_index = MemorizationIndex::build(t);
        std::optional<MemorizationIndex> control_index;
        if (c) control_index = MemorizationIndex::build(*c);
        return to_json(memorization_report(g, train_index, control_index ? &*control_index : nullptr, workers));
      },
      py::arg("generated"), py::arg("train"), py::arg("control") = py::none(), py::arg("workers") = 0);

  m.def(
      "read_dataset",
      [](const std::filesystem::path& path) {
        const auto samples = read_dataset(path);
        return py::make_tuple(to_grids(samples), labels_of(samples));
      },
      py::arg("path"));
  m.def(
      "write_dataset",
      [](const std::filesystem::path& path, const py::array& grids, std::optional<Labels> labels,
         const std::string& format) {
        if (format != "binary" && format != "jsonl") throw py::value_error("format must be binary or jsonl");
        write_dataset(to_samples(grids, labels), path, format == "binary" ? DatasetFormat::Binary : DatasetFormat::Jsonl);
      },
      py::arg("path"), py::arg("grids"), py::arg("labels") = py::none(), py::arg("format") = "binary");
}
