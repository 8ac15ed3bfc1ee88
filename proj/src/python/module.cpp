#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stylo/corpus.hpp"
#include "stylo/distance.hpp"
#include "stylo/error.hpp"
#include "stylo/eval.hpp"
#include "stylo/features.hpp"
#include "stylo/forest.hpp"
#include "stylo/mds.hpp"
#include "stylo/pipeline.hpp"

namespace py = pybind11;
using namespace stylo;

namespace {

py::array_t<double> as_array(const std::vector<double>& values, std::size_t rows, std::size_t cols) {
  py::array_t<double> out({rows, cols});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<double> as_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_stylo, m) {
  m.doc() = "Stylometric features, d_SJS distances, classical MDS and random forests";

  py::register_exception<Error>(m, "StyloError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ValueError);

  // corpus
  py::class_<TaggedToken>(m, "TaggedToken")
      .def_readonly("surface", &TaggedToken::surface)
      .def_readonly("features", &TaggedToken::features)
      .def_readonly("pos_path", &TaggedToken::pos_path)
      .def_readonly("base_form", &TaggedToken::base_form);
  py::class_<Sentence>(m, "Sentence")
      .def_property_readonly("tokens", &Sentence::tokens)
      .def_property_readonly("char_count", &Sentence::char_count)
      .def("__len__", &Sentence::size);
  py::class_<Document>(m, "Document")
      .def_readonly("id", &Document::id)
      .def_readonly("label", &Document::label)
      .def_readonly("sentences", &Document::sentences)
      .def_property_readonly("char_count", &Document::char_count)
      .def_property_readonly("token_count", &Document::token_count);
  py::class_<Corpus>(m, "Corpus")
      .def(py::init<std::vector<Document>>(), py::arg("documents"))
      .def_property_readonly("documents", &Corpus::documents)
      .def_property_readonly("labels", &Corpus::labels)
      .def("relabeled", &Corpus::relabeled, py::arg("mapping"))
      .def("__len__", &Corpus::size);

  m.def("parse_tagged", &parse_tagged, py::arg("content"), py::arg("id"), py::arg("label"));
  m.def("serialize_tagged", &serialize_tagged, py::arg("doc"));
  m.def("sample_to_length", &sample_to_length, py::arg("doc"), py::arg("target_chars"), py::arg("seed"));
  m.def("load_manifest", &load_manifest, py::arg("path"));

  // features
  py::enum_<FeatureFamily>(m, "FeatureFamily")
      .value("POS_BIGRAM", FeatureFamily::PosBigram)
      .value("PARTICLE_BIGRAM", FeatureFamily::ParticleBigram)
      .value("COMMA_POSITION", FeatureFamily::CommaPosition)
      .value("FUNCTION_WORD", FeatureFamily::FunctionWord);
  py::enum_<FeatureSet>(m, "FeatureSet")
      .value("POS2", FeatureSet::PosBigram)
      .value("PARTICLE2", FeatureSet::ParticleBigram)
      .value("COMMA", FeatureSet::CommaPosition)
      .value("FUNCTION", FeatureSet::FunctionWord)
      .value("ALL", FeatureSet::All);
  py::class_<FeatureKey>(m, "FeatureKey")
      .def_readonly("family", &FeatureKey::family)
      .def_readonly("parts", &FeatureKey::parts)
      .def("__str__", &FeatureKey::serialize)
      .def("__repr__", [](const FeatureKey& k) { return "FeatureKey(" + k.serialize() + ")"; });
  py::class_<FeatureVector>(m, "FeatureVector")
      .def_readonly("doc_id", &FeatureVector::doc_id)
      .def_property_readonly("counts",
                             [](const FeatureVector& v) {
                               py::dict d;
                               for (const auto& [k, c] : v.counts) d[py::str(k.serialize())] = c;
                               return d;
                             })
      .def_property_readonly("total", &FeatureVector::total);
  py::class_<FeatureMatrix>(m, "FeatureMatrix")
      .def_property_readonly("keys", &FeatureMatrix::keys)
      .def_property_readonly("doc_ids", &FeatureMatrix::doc_ids)
      .def_property_readonly("labels", &FeatureMatrix::labels)
      .def_property_readonly("values",
                             [](const FeatureMatrix& fm) { return as_array(fm.values(), fm.rows(), fm.cols()); })
      .def("to_csv", &FeatureMatrix::to_csv);

  m.def("pos_bigrams", &pos_bigrams, py::arg("doc"), py::arg("tag_depth") = 2);
  m.def("particle_bigrams", [](const Document& d) { return particle_bigrams(d); }, py::arg("doc"));
  m.def("comma_positions", [](const Document& d) { return comma_positions(d); }, py::arg("doc"));
  m.def("function_word_rates", [](const Document& d) { return function_word_rates(d); }, py::arg("doc"));
  m.def(
      "build_matrix",
      [](const Corpus& c, FeatureSet set, std::size_t tag_depth) {
        FeatureOptions o;
        o.tag_depth = tag_depth;
        return build_matrix(c, set, o);
      },
      py::arg("corpus"), py::arg("features") = FeatureSet::All, py::arg("tag_depth") = 2);

  // distance
  m.def(
      "sjs_distance",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
         const py::array_t<double, py::array::c_style | py::array::forcecast>& y) {
        return sjs_distance(as_vector(x), as_vector(y));
      },
      py::arg("x"), py::arg("y"));
  py::class_<DistanceMatrix>(m, "DistanceMatrix")
      .def_property_readonly("doc_ids", &DistanceMatrix::doc_ids)
      .def_property_readonly("labels", &DistanceMatrix::labels)
      .def_property_readonly("values",
                             [](const DistanceMatrix& d) { return as_array(d.values(), d.size(), d.size()); })
      .def("to_csv", &DistanceMatrix::to_csv);
  m.def("distance_matrix", &distance_matrix, py::arg("matrix"));

  // mds
  py::class_<Embedding>(m, "Embedding")
      .def_property_readonly("coordinates", [](const Embedding& e) { return as_array(e.coordinates, e.n, e.k); })
      .def_readonly("eigenvalues", &Embedding::eigenvalues)
      .def_readonly("negative_eigenvalues", &Embedding::negative_eigenvalues)
      .def_readonly("doc_ids", &Embedding::doc_ids)
      .def_readonly("labels", &Embedding::labels);
  m.def("classical_mds", &classical_mds, py::arg("distances"), py::arg("k") = 2);
  m.def(
      "emit_scatter",
      [](const Embedding& e, const std::filesystem::path& out) { return emit_scatter(e, {}, out); },
      py::arg("embedding"), py::arg("svg_path"));

  // forest
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("n_trees", &TrainConfig::n_trees)
      .def_readwrite("mtry", &TrainConfig::mtry)
      .def_readwrite("min_node_size", &TrainConfig::min_node_size)
      .def_readwrite("bootstrap", &TrainConfig::bootstrap)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("threads", &TrainConfig::threads);
  py::class_<Prediction>(m, "Prediction")
      .def_readonly("label", &Prediction::label)
      .def_readonly("votes", &Prediction::votes);
  py::class_<RandomForestModel>(m, "RandomForestModel")
      .def_property_readonly("classes", &RandomForestModel::classes)
      .def_property_readonly("importance", &RandomForestModel::importance)
      .def_property_readonly("n_trees", [](const RandomForestModel& f) { return f.trees().size(); })
      .def(
          "predict",
          [](const RandomForestModel& f, const py::array_t<double, py::array::c_style | py::array::forcecast>& row) {
            return f.predict(as_vector(row));
          },
          py::arg("row"))
      .def("serialize", &RandomForestModel::serialize)
      .def_static("deserialize", &RandomForestModel::deserialize);
  m.def(
      "train", [](const FeatureMatrix& fm, const TrainConfig& c) { return train(fm, c); },
      py::arg("matrix"), py::arg("config") = TrainConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def("ranked_importance",
        [](const RandomForestModel& f, const std::vector<FeatureKey>& keys) {
          std::vector<std::pair<std::string, double>> out;
          for (auto& [k, v] : ranked_importance(f, keys)) out.emplace_back(k.serialize(), v);
          return out;
        },
        py::arg("model"), py::arg("keys"));

  // eval
  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def(py::init<std::vector<std::string>, std::vector<std::vector<std::uint64_t>>>(),
           py::arg("classes"), py::arg("counts"))
      .def_property_readonly("classes", &ConfusionMatrix::classes)
      .def_property_readonly("counts", &ConfusionMatrix::counts)
      .def_property_readonly("total", &ConfusionMatrix::total)
      .def("to_csv", &ConfusionMatrix::to_csv);
  py::class_<ClassMetrics>(m, "ClassMetrics")
      .def_readonly("recall", &ClassMetrics::recall)
      .def_readonly("precision", &ClassMetrics::precision)
      .def_readonly("f1", &ClassMetrics::f1)
      .def_readonly("degenerate", &ClassMetrics::degenerate);
  py::class_<Metrics>(m, "Metrics")
      .def_readonly("accuracy", &Metrics::accuracy)
      .def_readonly("classes", &Metrics::classes)
      .def_readonly("per_class", &Metrics::per_class);
  py::class_<CvSummary>(m, "CvSummary")
      .def_readonly("fold_accuracies", &CvSummary::fold_accuracies)
      .def_readonly("mean", &CvSummary::mean)
      .def_readonly("sd", &CvSummary::sd);
  m.def("metrics", &metrics, py::arg("confusion"));
  m.def("summarize_folds", &summarize_folds, py::arg("fold_accuracies"));
  m.def("loocv", &loocv, py::arg("matrix"), py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("kfold", &kfold, py::arg("matrix"), py::arg("k"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("format_percent", &format_percent, py::arg("fraction"));
  m.def("render_report", &render_report, py::arg("confusion"), py::arg("title") = "");
}
