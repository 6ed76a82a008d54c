#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "askdb/error.hpp"
#include "askdb/number_words.hpp"
#include "askdb/service.hpp"
#include "askdb/spell.hpp"
#include "askdb/sql_explainer.hpp"
#include "askdb/sql_parser.hpp"

namespace py = pybind11;
using namespace askdb;

namespace {

// nlohmann::json to Python objects through the json module.
py::object to_python(const nlohmann::json& j) {
  static py::handle loads = py::object(py::module_::import("json").attr("loads")).release();
  return loads(j.dump());
}

CivilDate reference_or_today(const std::optional<std::string>& reference) {
  return reference ? parse_reference_date(*reference) : utc_date(std::chrono::system_clock::now());
}

py::dict normalized_dict(const NormalizedQuery& q) {
  py::list subs;
  for (const auto& s : q.substitutions) {
    py::dict d;
    d["start"] = s.span.start;
    d["end"] = s.span.end;
    d["kind"] = std::string(to_string(s.span.kind));
    d["replacement"] = s.replacement;
    subs.append(d);
  }
  py::dict out;
  out["original"] = q.original;
  out["normalized"] = q.normalized;
  out["substitutions"] = subs;
  return out;
}

OnboardingConfig config_from(const std::optional<std::string>& config_json) {
  return config_json ? OnboardingConfig::from_json(*config_json) : OnboardingConfig{};
}

nlohmann::json database_json(const OnboardedDatabase& db) {
  return nlohmann::json{{"id", db.id}, {"created_at", db.created_at}, {"status", "ready"},
                        {"schema", nlohmann::json::parse(schema_to_json(db))}};
}

class PyService {
 public:
  PyService(const std::string& data_root, const std::optional<std::string>& fixtures,
            const std::optional<std::string>& backend_url) {
    ServiceOptions options;
    options.data_root = data_root;
    if (backend_url) {
      options.translator = std::make_shared<RemoteTranslator>(*backend_url);
    } else {
      options.translator = std::make_shared<FixtureTranslator>(
          FixtureTranslator::load(fixtures.value_or(default_data_dir() + "/fixtures/translations.json")));
    }
    service_ = std::make_unique<Service>(std::move(options));
  }

  py::object onboard_file(const std::string& path, const std::optional<std::string>& config_json) {
    OnboardedDatabase db;
    {
      py::gil_scoped_release release;
      db = service_->onboard_file(path, config_from(config_json));
    }
    return to_python(database_json(db));
  }

  py::object list_databases() const {
    auto out = nlohmann::json::array();
    for (const auto& db : service_->list_databases()) out.push_back(database_json(db));
    return to_python(out);
  }

  py::object query(const std::string& database_id, const std::string& text,
                   const std::optional<std::string>& reference) {
    std::optional<CivilDate> ref;
    if (reference) ref = parse_reference_date(*reference);
    QueryResponse r;
    {
      py::gil_scoped_release release;
      r = service_->query(database_id, text, ref);
    }
    return to_python(r.to_json());
  }

  py::object history(const std::string& database_id, std::size_t page) const {
    auto out = nlohmann::json::array();
    for (const auto& e : service_->history(database_id, page)) out.push_back(e.to_json());
    return to_python(out);
  }

  std::string result_csv(const std::string& result_id) { return service_->result_csv(result_id); }

  py::object result_visualizations(const std::string& result_id) {
    return to_python(viz::to_json(service_->result_visualizations(result_id)));
  }

  std::size_t cache_size() const { return service_->translator_cache_size(); }

 private:
  std::unique_ptr<Service> service_;
};

}  // namespace

PYBIND11_MODULE(_askdb, m) {
  m.doc() = "Natural-language questions over onboarded databases";

  // Leaked on purpose: the type must outlive every translated exception.
  static py::handle error_type = py::exception<Error>(m, "AskdbError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(e.what());
      exc.attr("kind") = std::string(e.kind());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("normalize_query",
        [](const std::string& text, const std::optional<std::string>& reference) {
          return normalized_dict(normalize_query(text, reference_or_today(reference)));
        },
        py::arg("text"), py::arg("reference") = py::none(),
        "Rewrite dates in a question into yyyymmdd / 'Month: X, Year: Y' / 'Year: Y'.");

  m.def("clean_identifier", &clean_identifier, py::arg("name"));
  m.def("words_to_numbers", &words_to_numbers, py::arg("text"));
  m.def("edit_distance",
        [](const std::string& a, const std::string& b, std::size_t max_distance) {
          return bounded_edit_distance(a, b, max_distance);
        },
        py::arg("a"), py::arg("b"), py::arg("max_distance"));

  m.def("tokenize", [](const std::string& sql) {
    py::list out;
    for (const auto& t : sql::tokenize(sql)) {
      out.append(py::make_tuple(std::string(sql::to_string(t.kind)), t.text, t.position));
    }
    return out;
  }, py::arg("sql"));
  m.def("canonical_sql", [](const std::string& sql) { return sql::render(sql::parse(sql)); }, py::arg("sql"));
  m.def("explain", [](const std::string& sql) { return explain(sql::parse(sql)).render(); }, py::arg("sql"));
  m.def("explain_json", [](const std::string& sql) { return to_python(explain(sql::parse(sql)).to_json()); },
        py::arg("sql"));

  py::class_<PyService>(m, "Service")
      .def(py::init<const std::string&, const std::optional<std::string>&, const std::optional<std::string>&>(),
           py::arg("data_root"), py::arg("fixtures") = py::none(), py::arg("backend_url") = py::none())
      .def("onboard_file", &PyService::onboard_file, py::arg("path"), py::arg("config_json") = py::none())
      .def("list_databases", &PyService::list_databases)
      .def("query", &PyService::query, py::arg("database_id"), py::arg("text"), py::arg("reference") = py::none())
      .def("history", &PyService::history, py::arg("database_id"), py::arg("page") = 1)
      .def("result_csv", &PyService::result_csv, py::arg("result_id"))
      .def("result_visualizations", &PyService::result_visualizations, py::arg("result_id"))
      .def_property_readonly("cache_size", &PyService::cache_size);

  m.attr("default_data_dir") = default_data_dir();
}
