// Python bindings for the main operations: domain construction, forward
// wave invariants, inversion, Hessian/Chebyshev diagnostics, billiard
// oracles, and the verification suites.  Structured data crosses the
// boundary as JSON-compatible dicts (the same schemas the CLI files use).

#include "wavinv/billiard.hpp"
#include "wavinv/errors.hpp"
#include "wavinv/inversion.hpp"
#include "wavinv/io.hpp"
#include "wavinv/length_hessian.hpp"
#include "wavinv/verify.hpp"
#include "wavinv/wave_invariants.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace wavinv;

namespace {

io::ordered_json json_from_str(const std::string& text) { return io::ordered_json::parse(text); }

std::string forward_json(const std::string& domain_json, int r_max, int j_max) {
    DomainSpec spec = io::domain_from_json(json_from_str(domain_json));
    return io::dump(io::table_to_json(forward_table(spec, r_max, j_max)));
}

std::string invert_json(const std::string& table_json, int j_max, const std::vector<double>& alpha) {
    WaveInvariantTable table = io::table_from_json(json_from_str(table_json));
    RecoverOptions opts;
    opts.j_max = std::min(j_max, table.j_max);
    opts.alpha_override = alpha;
    RecoveredJet rec = invert_pipeline(table, opts);
    return io::dump(io::recovered_to_json(rec, table.L, table.n));
}

py::dict floquet_dict(const std::string& domain_json) {
    DomainSpec spec = io::domain_from_json(json_from_str(domain_json));
    OrbitData orbit = floquet_from_curvature(spec);
    py::dict out;
    out["nu"] = orbit.nu;
    out["a"] = orbit.a;
    out["alpha"] = orbit.alpha;
    py::list stab;
    for (auto s : orbit.stability) stab.append(s == Stability::elliptic ? "elliptic" : "hyperbolic");
    out["stability"] = stab;
    return out;
}

py::dict det_identity_dict(const std::string& domain_json, int r) {
    DomainSpec spec = io::domain_from_json(json_from_str(domain_json));
    DetIdentityReport rep = det_identity_check(spec, r);
    py::dict out;
    out["det_numeric"] = rep.det_numeric;
    out["predicted_abs"] = rep.predicted_abs;
    out["rel_err"] = rep.rel_err;
    return out;
}

std::vector<std::complex<double>> poincare_eigs(const std::string& domain_json) {
    DomainSpec spec = io::domain_from_json(json_from_str(domain_json));
    return poincare_eigenvalues_numeric(spec);
}

py::dict run_suite_dict(const std::string& name, std::uint64_t seed) {
    verify::SuiteResult r = verify::run_suite(name, seed);
    py::dict out;
    out["name"] = r.name;
    out["passed"] = r.passed;
    out["measured"] = r.measured;
    out["tolerance"] = r.tolerance;
    out["seconds"] = r.seconds;
    out["detail"] = r.detail;
    return out;
}

} // namespace

PYBIND11_MODULE(_wavinv, m) {
    m.doc() = "forward/inverse wave invariants of bouncing-ball orbits in symmetric analytic billiards";

    py::register_exception<SpecError>(m, "SpecError");
    py::register_exception<ResonanceError>(m, "ResonanceError");
    py::register_exception<IllConditionedError>(m, "IllConditionedError");
    py::register_exception<InconsistentDataError>(m, "InconsistentDataError");
    py::register_exception<NumericalError>(m, "NumericalError");

    m.def("forward", &forward_json, py::arg("domain_json"), py::arg("r_max") = 4, py::arg("j_max") = 2,
          "DomainSpec JSON string -> WaveInvariantTable JSON string");
    m.def("invert", &invert_json, py::arg("table_json"), py::arg("j_max") = 2,
          py::arg("alpha") = std::vector<double>{},
          "WaveInvariantTable JSON string -> RecoveredJet JSON string");
    m.def("floquet", &floquet_dict, py::arg("domain_json"),
          "curvatures, Hessian diagonals, stability and Floquet exponents");
    m.def("det_identity", &det_identity_dict, py::arg("domain_json"), py::arg("r") = 1,
          "numeric vs predicted |det| of the length-functional Hessian");
    m.def("poincare_eigenvalues", &poincare_eigs, py::arg("domain_json"),
          "numeric eigenvalues of the two-step billiard map at the orbit");
    m.def("chebyshev_T", &chebyshev_T, py::arg("m"), py::arg("x"));
    m.def("chebyshev_U", &chebyshev_U, py::arg("m"), py::arg("x"));
    m.def("hankel_amp_coeffs", &hankel_amp_coeffs, py::arg("nu"), py::arg("m"),
          "large-argument amplitude coefficients of e^{-iz} Ha_nu(z)");
    m.def("inverse_hessian_element", &inverse_hessian_element, py::arg("a"), py::arg("L"), py::arg("r"),
          py::arg("p"), py::arg("q"), "closed-form inverse Hessian element h^{ii,pq}");
    m.def("verify_suite", &run_suite_dict, py::arg("name"), py::arg("seed") = 1,
          "run one verification suite");
    m.def("suite_names", [] { return verify::suite_names(); });

    m.attr("__version__") = "0.1.0";
}
