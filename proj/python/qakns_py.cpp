#include "qakns/suite.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qakns;

namespace {

// configs cross the boundary as JSON text; the Python side wraps dicts
RunConfig config_from(const std::string& text) { return parse_config(nlohmann::json::parse(text)); }

std::vector<std::string> strings(const XSeries& f)
{
    std::vector<std::string> out;
    for (int k = 0; k < f.precision(); ++k) out.push_back(to_string(f[k]));
    return out;
}

XSeries series(const std::vector<std::string>& c, int order)
{
    std::vector<Scalar> s;
    for (const auto& t : c) s.push_back(parse_scalar(t));
    return XSeries(order, s);
}

// {z-degree: [[coefficient lists]]} for every determined degree down to deepest
py::dict coefficients(const MZSeries& s, int deepest)
{
    py::dict out;
    for (int d = 0; d >= deepest && s.known(d); --d) {
        const MatX m = s.coeff(d);
        py::list rows;
        for (int i = 0; i < m.dim(); ++i) {
            py::list row;
            for (int j = 0; j < m.dim(); ++j) row.append(strings(m(i, j)));
            rows.append(row);
        }
        out[py::int_(d)] = rows;
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "exact q-AKNS-D hierarchy checks";

    // translators run newest first, so the base class goes in first
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DepthError>(m, "DepthError", PyExc_ArithmeticError);
    py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_ArithmeticError);
    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(config_error, e.what());
        } catch (const nlohmann::json::exception& e) {
            py::set_error(config_error, e.what());
        }
    });

    m.def("load_config", [](const std::string& path) { return to_json(load_config(path)).dump(); }, py::arg("path"),
          "Validated canonical config as JSON text.");
    m.def("normalize_config", [](const std::string& text) { return to_json(config_from(text)).dump(); },
          py::arg("config_json"));
    m.def("builtin_config", [](const std::string& name) { return to_json(builtin_config(name)).dump(); },
          py::arg("name"));
    m.def("config_hash", [](const std::string& text) { return config_hash(config_from(text)); },
          py::arg("config_json"));
    m.def("check_names", [](const std::string& text) { return check_names(config_from(text)); },
          py::arg("config_json"));
    m.def(
        "run_suite",
        [](const std::string& text, std::vector<std::string> only, std::string inject, bool timing) {
            RunConfig c = config_from(text);
            SuiteOptions o{std::move(only), std::move(inject)};
            Report r;
            {
                py::gil_scoped_release release;
                r = run_suite(c, o);
            }
            return to_json(r, timing).dump();
        },
        py::arg("config_json"), py::arg("only") = std::vector<std::string>{}, py::arg("inject") = "",
        py::arg("timing") = true, "Report as JSON text.");
    m.def(
        "dressing",
        [](const std::string& text, int depth) {
            LaxData l = config_from(text).lax();
            Dressing d = solve_dressing(l, depth);
            return coefficients(d.w, -d.depth);
        },
        py::arg("config_json"), py::arg("depth"));
    m.def("max_dressing_depth",
          [](const std::string& text, int limit) { return max_dressing_depth(config_from(text).lax(), limit); },
          py::arg("config_json"), py::arg("limit"));
    m.def(
        "resolvent",
        [](const std::string& text, int alpha, int depth) {
            LaxData l = config_from(text).lax();
            if (alpha < 1 || alpha > l.n()) throw ConfigError("channel out of range");
            Resolvent r = solve_resolvent_direct(l, alpha - 1, depth);
            return coefficients(r.r, -r.depth);
        },
        py::arg("config_json"), py::arg("alpha"), py::arg("depth"));
    m.def(
        "q_shift_coefficient", [](int k, const std::string& q) { return to_string(q_shift_coefficient(k, parse_scalar(q))); },
        py::arg("k"), py::arg("q"), "(1-q)^k / (k (1-q^k)) as \"p/q\".");
    m.def(
        "exp_q", [](int order, const std::string& c, const std::string& q) {
            return strings(exp_q_series(order, parse_scalar(c), parse_scalar(q)));
        },
        py::arg("order"), py::arg("c"), py::arg("q"), "Coefficients of exp_q(c x) through x^order.");
    m.def(
        "q_derive",
        [](const std::vector<std::string>& coeffs, const std::string& q) {
            const int order = static_cast<int>(coeffs.size()) - 1;
            if (order < 0) throw ConfigError("empty series");
            return strings(q_derive(series(coeffs, order), parse_scalar(q)));
        },
        py::arg("coeffs"), py::arg("q"));
}
