#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "gcnal/alloop.hpp"
#include "gcnal/cli.hpp"
#include "gcnal/config.hpp"
#include "gcnal/datasets.hpp"
#include "gcnal/error.hpp"
#include "gcnal/gcn.hpp"
#include "gcnal/graph.hpp"
#include "gcnal/numerics.hpp"
#include "gcnal/strategies.hpp"

namespace py = pybind11;
using namespace gcnal;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& a) {
  if (a.ndim() == 1) {
    return Matrix(static_cast<std::size_t>(a.shape(0)), 1,
                  std::vector<double>(a.data(), a.data() + a.size()));
  }
  if (a.ndim() != 2) throw py::value_error("expected a 1-D or 2-D array");
  return Matrix(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> to_array(const Matrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

py::dict curve_dict(const Curve& c) {
  py::dict d;
  py::list cycle, labelled, mean, stddev, trials;
  for (const auto& p : c.points) {
    cycle.append(p.cycle);
    labelled.append(p.labelled);
    mean.append(p.mean);
    stddev.append(p.stddev);
    trials.append(py::cast(p.trials));
  }
  d["label"] = c.label;
  d["cycle"] = cycle;
  d["labelled"] = labelled;
  d["mean"] = mean;
  d["std"] = stddev;
  d["trials"] = trials;
  return d;
}

AdjacencyMode mode_of(const std::string& name) {
  const auto m = parse_adjacency_mode(name);
  if (!m) throw py::value_error("adjacency mode must be similarity, identity or ones");
  return *m;
}

SelectionRequest request(std::vector<std::size_t> labelled, std::vector<std::size_t> candidates,
                         std::size_t budget, double margin) {
  SelectionRequest r;
  r.labelled = std::move(labelled);
  r.candidates = std::move(candidates);
  r.budget = budget;
  r.margin = margin;
  r.validate();
  return r;
}

py::tuple result_tuple(const SelectionResult& r) { return py::make_tuple(r.chosen, r.scores); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pool-based active learning with sequential GCN samplers";
  py::register_exception<Error>(m, "GcnalError", PyExc_ValueError);

  m.def("l2_normalize_rows", [](const DoubleArray& x) { return to_array(l2_normalize_rows(to_matrix(x))); });
  m.def("pairwise_sqdist", [](const DoubleArray& a, const DoubleArray& b) {
    return to_array(pairwise_sqdist(to_matrix(a), to_matrix(b)));
  });

  m.def("build_adjacency",
        [](const DoubleArray& features, const std::string& mode) {
          return to_array(build_adjacency(to_matrix(features), mode_of(mode)).a);
        },
        py::arg("features"), py::arg("mode") = "similarity");

  py::class_<GcnTrainConfig>(m, "GcnTrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &GcnTrainConfig::epochs)
      .def_readwrite("lr", &GcnTrainConfig::lr)
      .def_readwrite("weight_decay", &GcnTrainConfig::weight_decay)
      .def_readwrite("lambda_", &GcnTrainConfig::lambda)
      .def_readwrite("dropout", &GcnTrainConfig::dropout)
      .def_readwrite("layers", &GcnTrainConfig::layers)
      .def_readwrite("hidden_width", &GcnTrainConfig::hidden_width)
      .def_readwrite("seed", &GcnTrainConfig::seed);

  py::class_<GcnModel>(m, "GcnModel")
      .def_property_readonly("layers", &GcnModel::layers)
      .def_property_readonly("hidden_width", &GcnModel::hidden_width)
      .def_readonly("dropout", &GcnModel::dropout)
      .def_property_readonly("weights", [](const GcnModel& g) {
        py::list out;
        for (const auto& w : g.weights) out.append(to_array(w));
        return out;
      });

  m.def("train_gcn",
        [](const DoubleArray& adjacency, const DoubleArray& features, std::vector<bool> labelled,
           const GcnTrainConfig& config) {
          return train_gcn(to_matrix(adjacency), to_matrix(features), labelled, config);
        },
        py::arg("adjacency"), py::arg("features"), py::arg("labelled"), py::arg("config"));
  m.def("gcn_forward",
        [](const GcnModel& model, const DoubleArray& adjacency, const DoubleArray& features) {
          auto f = gcn_forward(model, to_matrix(adjacency), to_matrix(features));
          return py::make_tuple(to_array(f.hidden), f.scores);
        },
        "Inference pass; returns (first-layer embeddings, scores).");
  m.def("gcn_loss", [](std::vector<double> scores, std::vector<bool> labelled, double lambda) {
    return gcn_loss(scores, labelled, lambda);
  }, py::arg("scores"), py::arg("labelled"), py::arg("lambda_"));
  m.def("gcn_backward",
        [](const GcnModel& model, const DoubleArray& adjacency, const DoubleArray& features,
           std::vector<bool> labelled, double lambda) {
          py::list out;
          for (const auto& g :
               gcn_backward(model, to_matrix(adjacency), to_matrix(features), labelled, lambda))
            out.append(to_array(g));
          return out;
        },
        py::arg("model"), py::arg("adjacency"), py::arg("features"), py::arg("labelled"),
        py::arg("lambda_"));

  m.def("kcenter_greedy",
        [](const DoubleArray& anchors, const DoubleArray& candidates, std::size_t budget) {
          const auto p = kcenter_greedy(to_matrix(anchors), to_matrix(candidates), budget);
          return py::make_tuple(p.positions, p.distances);
        });
  m.def("select_uncertain_gcn",
        [](std::vector<std::size_t> labelled, std::vector<std::size_t> candidates,
           std::size_t budget, std::vector<double> scores, std::vector<std::size_t> node_to_pool,
           double margin) {
          return result_tuple(select_uncertain_gcn(
              request(std::move(labelled), std::move(candidates), budget, margin), scores,
              node_to_pool));
        },
        py::arg("labelled"), py::arg("candidates"), py::arg("budget"), py::arg("scores"),
        py::arg("node_to_pool"), py::arg("margin") = 0.1);
  m.def("select_random",
        [](std::vector<std::size_t> labelled, std::vector<std::size_t> candidates,
           std::size_t budget, std::uint64_t seed) {
          Rng rng(seed);
          return result_tuple(
              select_random(request(std::move(labelled), std::move(candidates), budget, 0.1), rng));
        },
        py::arg("labelled"), py::arg("candidates"), py::arg("budget"), py::arg("seed") = 0);
  m.def("entropy", [](std::vector<double> p) { return entropy(p); });

  m.def("generate_blobs",
        [](std::size_t classes, std::size_t per_class, std::size_t dim, double spread,
           double noise, std::uint64_t seed, std::size_t reduced_classes, double reduced_fraction) {
          Rng rng(seed);
          const auto split = generate_blobs(BlobSpec::imbalanced(classes, per_class, reduced_classes,
                                                                 reduced_fraction, dim, spread, noise),
                                            rng);
          py::dict d;
          d["x_train"] = to_array(split.train.inputs);
          d["y_train"] = split.train.labels;
          d["x_test"] = to_array(split.test.inputs);
          d["y_test"] = split.test.labels;
          return d;
        },
        py::arg("classes") = 10, py::arg("per_class") = 250, py::arg("dim") = 32,
        py::arg("spread") = 1.0, py::arg("noise") = 1.0, py::arg("seed") = 0,
        py::arg("reduced_classes") = 0, py::arg("reduced_fraction") = 0.1);

  m.def("run_experiment",
        [](const std::string& config_text) {
          const auto cfg = parse_config(config_text);
          const auto exp = prepare_experiment(cfg);
          Curve c;
          {
            py::gil_scoped_release release;
            c = run_experiment(exp.data.train, exp.data.test, exp.loop, exp.trainer);
          }
          return curve_dict(c);
        },
        py::arg("config_text"), "Run one strategy from config text (key = value lines).");
  m.def("run_comparison",
        [](const std::string& config_text, const std::vector<std::string>& strategies) {
          const auto cfg = parse_config(config_text);
          std::vector<StrategyId> ids;
          for (const auto& s : strategies) {
            const auto id = parse_strategy(s);
            if (!id) throw py::value_error("unknown strategy '" + s + "'");
            ids.push_back(*id);
          }
          std::vector<Curve> curves;
          {
            py::gil_scoped_release release;
            curves = run_comparison(cfg, ids);
          }
          py::list out;
          for (const auto& c : curves) out.append(curve_dict(c));
          return out;
        });
  m.def("cli_main", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, "Run the command-line interface in-process; returns (exit code, stdout, stderr).");
}
