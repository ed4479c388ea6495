#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qdlab/reports.hpp"
#include "qdlab/spectra.hpp"

namespace qdlab::cli {

enum class OutputFormat { Json, Csv, Table };

inline OutputFormat parse_format(const std::string& s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    if (s == "table") return OutputFormat::Table;
    throw std::invalid_argument("unknown format '" + s + "' (expected json|csv|table)");
}

inline Family parse_family(const std::string& s) {
    if (s == "double") return Family::DoubleOnly;
    if (s == "dual") return Family::DualMatter;
    if (s == "vertex") return Family::VertexMatter;
    throw std::invalid_argument("unknown family '" + s + "' (expected double|dual|vertex)");
}

/// Parses a theta descriptor: trivial | regular | block:<blocks>x<fixed>.
inline ThetaAction parse_theta(const std::string& desc, std::uint32_t gauge,
                               std::uint32_t matter) {
    if (desc == "trivial") return ThetaAction::trivial(matter == 0 ? 1 : matter);
    if (desc == "regular") return ThetaAction::regular(gauge);
    if (desc.rfind("block:", 0) == 0) {
        std::string body = desc.substr(6);
        std::size_t x = body.find('x');
        if (x == std::string::npos)
            throw std::invalid_argument("theta block descriptor needs block:<blocks>x<fixed>");
        std::uint32_t blocks = static_cast<std::uint32_t>(std::stoul(body.substr(0, x)));
        std::uint32_t fixed = static_cast<std::uint32_t>(std::stoul(body.substr(x + 1)));
        return ThetaAction::block_shift(gauge, blocks, fixed);
    }
    throw std::invalid_argument("unknown theta descriptor '" + desc + "'");
}

/// Everything a run needs; flat key=value config plus command-line overrides.
struct RunConfig {
    std::string family = "dual";
    std::uint32_t gauge = 2;
    std::uint32_t matter = 1;
    std::uint32_t hom = 0;
    std::string theta = "trivial";
    std::uint32_t rows = 2;
    std::uint32_t cols = 2;
    std::uint32_t genus = 1;  // reserved: the oracle runs on the torus
    std::string format = "json";
    double tol = 1e-10;
    std::uint64_t cap = 2000000;
    // command-specific knobs
    std::uint32_t charge = 1;
    std::uint32_t max_length = 3;
    std::string string_kind = "z";
    std::uint32_t edge = 0;
    std::uint32_t face = 0;
    std::uint32_t eigen_count = 16;

    ModelSpec to_model_spec() const {
        if (genus != 1) throw std::invalid_argument("only genus 1 (torus) is supported");
        ModelSpec s;
        s.family = parse_family(family);
        s.n_gauge = gauge;
        s.rows = rows;
        s.cols = cols;
        if (s.family == Family::DualMatter)
            s.k_matter = matter == 0 ? 1 : matter;
        else if (s.family == Family::DoubleOnly)
            s.k_matter = 1;
        else
            s.theta = parse_theta(theta, gauge, matter);
        s.multiplier = hom;
        s.validate();
        return s;
    }

    OutputFormat output_format() const { return parse_format(format); }
};

/// Applies one key=value setting; throws on unknown keys or bad values.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_u32 = [&](const std::string& v) {
        return static_cast<std::uint32_t>(std::stoul(v));
    };
    if (key == "family") cfg.family = value;
    else if (key == "gauge") cfg.gauge = as_u32(value);
    else if (key == "matter") cfg.matter = as_u32(value);
    else if (key == "hom") cfg.hom = as_u32(value);
    else if (key == "theta") cfg.theta = value;
    else if (key == "rows") cfg.rows = as_u32(value);
    else if (key == "cols") cfg.cols = as_u32(value);
    else if (key == "genus") cfg.genus = as_u32(value);
    else if (key == "format") cfg.format = value;
    else if (key == "tol") cfg.tol = std::stod(value);
    else if (key == "cap") cfg.cap = std::stoull(value);
    else if (key == "charge") cfg.charge = as_u32(value);
    else if (key == "max_length") cfg.max_length = as_u32(value);
    else if (key == "string") cfg.string_kind = value;
    else if (key == "edge") cfg.edge = as_u32(value);
    else if (key == "face") cfg.face = as_u32(value);
    else if (key == "eigen_count") cfg.eigen_count = as_u32(value);
    else throw std::invalid_argument("unknown configuration key '" + key + "'");
}

/// Reads a flat key=value file ('#' starts a comment, blank lines skipped).
inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto ltrim = line.find_first_not_of(" \t\r");
        if (ltrim == std::string::npos) continue;
        auto rtrim = line.find_last_not_of(" \t\r");
        line = line.substr(ltrim, rtrim - ltrim + 1);
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto strip = [](std::string s) {
            auto a = s.find_first_not_of(" \t");
            auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        apply_setting(cfg, strip(key), strip(val));
    }
}

namespace detail {

inline std::string monomial_name(const WMonomial& m) {
    if (m.x_pow == 0 && m.z_pow == 0) return "1";
    std::string s;
    if (m.x_pow == 1) s += "X";
    else if (m.x_pow > 1) s += "X^" + std::to_string(m.x_pow);
    if (m.z_pow == 1) s += "Z";
    else if (m.z_pow > 1) s += "Z^" + std::to_string(m.z_pow);
    return s;
}

inline Json spec_header(const char* command, const RunConfig& cfg) {
    Json j = Json::object();
    j.set("schema", 1);
    j.set("command", command);
    j.set("family", cfg.family);
    j.set("gauge", cfg.gauge);
    if (cfg.family == "vertex") {
        j.set("theta", cfg.theta);
    } else {
        j.set("matter", cfg.family == "double" ? 1u : std::max(cfg.matter, 1u));
        j.set("hom", cfg.hom);
    }
    j.set("rows", cfg.rows);
    j.set("cols", cfg.cols);
    return j;
}

}  // namespace detail

// Every command returns the process exit code: 0 success, 1 physics-check
// failure, 2 configuration error.  Configuration problems throw
// std::invalid_argument out of here; main() maps them to exit code 2.

inline int cmd_enumerate(const RunConfig& cfg, std::ostream& os) {
    auto homs = enumerate_homomorphisms(std::max(cfg.matter, 1u), cfg.gauge);
    OutputFormat fmt = cfg.output_format();
    if (fmt == OutputFormat::Json) {
        Json j = Json::object();
        j.set("schema", 1);
        j.set("command", "enumerate");
        j.set("gauge", cfg.gauge);
        j.set("matter", std::max(cfg.matter, 1u));
        Json arr = Json::array();
        for (const auto& f : homs) {
            Classification c = classify(cfg.gauge, f.domain_order(), f.multiplier());
            Json row = Json::object();
            row.set("n", f.multiplier());
            row.set("class", to_string(c.label));
            row.set("kernel", c.kernel);
            row.set("image", c.image);
            row.set("cokernel", c.cokernel);
            row.set("gsd_torus", gsd_formula(f, 1));
            arr.push(std::move(row));
        }
        j.set("couplings", std::move(arr));
        os << j.dump() << "\n";
    } else {
        TextTable t({"n", "class", "kernel", "image", "cokernel", "gsd_torus"});
        for (const auto& f : homs) {
            Classification c = classify(cfg.gauge, f.domain_order(), f.multiplier());
            t.add_row({std::to_string(f.multiplier()), to_string(c.label),
                       std::to_string(c.kernel), std::to_string(c.image),
                       std::to_string(c.cokernel), std::to_string(gsd_formula(f, 1))});
        }
        if (fmt == OutputFormat::Csv) {
            os << "n,class,kernel,image,cokernel,gsd_torus\n";
            for (const auto& f : homs) {
                Classification c = classify(cfg.gauge, f.domain_order(), f.multiplier());
                os << f.multiplier() << ',' << to_string(c.label) << ',' << c.kernel << ','
                   << c.image << ',' << c.cokernel << ',' << gsd_formula(f, 1) << '\n';
            }
        } else {
            t.print(os);
        }
    }
    return 0;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& os) {
    ModelSpec spec = cfg.to_model_spec();  // invalid configs leave as exceptions
    SolvabilityReport rep = solvability_check(spec);
    bool passed = rep.passed(cfg.tol);
    OutputFormat fmt = cfg.output_format();
    if (fmt == OutputFormat::Json) {
        Json j = detail::spec_header("verify", cfg);
        j.set("dimension", rep.dimension);
        j.set("abelian", rep.abelian_ok);
        j.set("center", rep.center_ok);
        j.set("max_commutator", rep.max_commutator);
        j.set("max_projector_defect", rep.max_projector_defect);
        j.set("max_hermiticity_defect", rep.max_hermiticity_defect);
        j.set("worst_pair", rep.worst_pair);
        j.set("tolerance", cfg.tol);
        j.set("passed", passed);
        os << j.dump() << "\n";
    } else if (fmt == OutputFormat::Csv) {
        os << "dimension,max_commutator,max_projector_defect,max_hermiticity_defect,passed\n";
        os << rep.dimension << ',' << format_float(rep.max_commutator) << ','
           << format_float(rep.max_projector_defect) << ','
           << format_float(rep.max_hermiticity_defect) << ',' << (passed ? 1 : 0) << '\n';
    } else {
        TextTable t({"quantity", "value"});
        t.add_row({"dimension", std::to_string(rep.dimension)});
        t.add_row({"max commutator", format_float(rep.max_commutator)});
        t.add_row({"max projector defect", format_float(rep.max_projector_defect)});
        t.add_row({"max hermiticity defect", format_float(rep.max_hermiticity_defect)});
        t.add_row({"worst pair", rep.worst_pair});
        t.add_row({"passed", passed ? "yes" : "no"});
        t.print(os);
    }
    return passed ? 0 : 1;
}

inline int cmd_gsd(const RunConfig& cfg, std::ostream& os) {
    Model model(cfg.to_model_spec());
    GsdResult r = ground_space_dimension(model, cfg.cap);
    OutputFormat fmt = cfg.output_format();
    if (fmt == OutputFormat::Json) {
        Json j = detail::spec_header("gsd", cfg);
        j.set("dimension", r.dimension);
        j.set("flat_states", r.flat_states);
        j.set("trace", r.trace);
        j.set("oracle", r.oracle);
        if (r.has_formula) {
            j.set("formula", r.formula);
            j.set("match", r.match);
        }
        os << j.dump() << "\n";
    } else if (fmt == OutputFormat::Csv) {
        os << "dimension,oracle,formula,match\n";
        os << r.dimension << ',' << r.oracle << ',';
        if (r.has_formula)
            os << r.formula << ',' << (r.match ? 1 : 0);
        else
            os << ",";
        os << '\n';
    } else {
        TextTable t({"quantity", "value"});
        t.add_row({"dimension", std::to_string(r.dimension)});
        t.add_row({"oracle", std::to_string(r.oracle)});
        if (r.has_formula) {
            t.add_row({"formula", std::to_string(r.formula)});
            t.add_row({"match", r.match ? "yes" : "no"});
        }
        t.print(os);
    }
    return (!r.has_formula || r.match) ? 0 : 1;
}

inline int cmd_confine(const RunConfig& cfg, std::ostream& os) {
    Model model(cfg.to_model_spec());
    if (cfg.string_kind != "z" && cfg.string_kind != "x")
        throw std::invalid_argument("string kind must be z or x");
    StringKind kind = cfg.string_kind == "z" ? StringKind::Z : StringKind::X;
    if (cfg.charge >= cfg.gauge) throw std::invalid_argument("charge must lie in [0, N)");
    std::vector<std::uint32_t> lens;
    for (std::uint32_t l = 1; l <= cfg.max_length; ++l) lens.push_back(l);
    ConfinementProfile prof = confinement_profile(model, cfg.charge, lens, kind);

    OutputFormat fmt = cfg.output_format();
    if (fmt == OutputFormat::Json) {
        Json j = detail::spec_header("confine", cfg);
        j.set("charge", cfg.charge);
        j.set("string", cfg.string_kind);
        Json arr = Json::array();
        for (const auto& [len, de] : prof.entries) {
            Json row = Json::object();
            row.set("length", len);
            row.set("delta_e", de);
            arr.push(std::move(row));
        }
        j.set("profile", std::move(arr));
        os << j.dump() << "\n";
    } else if (fmt == OutputFormat::Csv) {
        os << "length,delta_e\n";
        for (const auto& [len, de] : prof.entries) os << len << ',' << format_float(de) << '\n';
    } else {
        TextTable t({"length", "delta_e", ""});
        for (const auto& [len, de] : prof.entries) {
            int bars = static_cast<int>(std::lround(std::max(0.0, de)));
            t.add_row({std::to_string(len), format_float(de), std::string(bars, '#')});
        }
        t.print(os);
    }
    return 0;
}

inline int cmd_spectrum(const RunConfig& cfg, std::ostream& os) {
    Model model(cfg.to_model_spec());
    if (model.layout().dim() > 4096)
        throw std::invalid_argument("spectrum is dense-only: dimension " +
                                    std::to_string(model.layout().dim()) + " exceeds 4096");
    std::vector<double> ev = dense_spectrum(model);
    std::uint64_t mult = ground_multiplicity(ev, model.ground_energy(), 1e-8);
    std::size_t count = std::min<std::size_t>(cfg.eigen_count, ev.size());

    OutputFormat fmt = cfg.output_format();
    if (fmt == OutputFormat::Json) {
        Json j = detail::spec_header("spectrum", cfg);
        j.set("dimension", model.layout().dim());
        j.set("ground_energy", model.ground_energy());
        j.set("ground_multiplicity", mult);
        Json arr = Json::array();
        for (std::size_t i = 0; i < count; ++i) arr.push(ev[i]);
        j.set("eigenvalues", std::move(arr));
        os << j.dump() << "\n";
    } else if (fmt == OutputFormat::Csv) {
        os << "index,eigenvalue\n";
        for (std::size_t i = 0; i < count; ++i) os << i << ',' << format_float(ev[i]) << '\n';
    } else {
        TextTable t({"index", "eigenvalue"});
        for (std::size_t i = 0; i < count; ++i)
            t.add_row({std::to_string(i), format_float(ev[i])});
        t.print(os);
        os << "ground multiplicity at E0=" << format_float(model.ground_energy()) << ": " << mult
           << "\n";
    }
    return 0;
}

inline int cmd_wops(const RunConfig& cfg, std::ostream& os) {
    Model model(cfg.to_model_spec());
    if (cfg.face >= model.lattice().n_faces()) throw std::invalid_argument("invalid face id");
    WOperatorTable table = solve_w_operators(model, cfg.face, cfg.tol);

    OutputFormat fmt = cfg.output_format();
    if (fmt == OutputFormat::Json) {
        Json j = detail::spec_header("wops", cfg);
        j.set("face", table.face);
        Json arr = Json::array();
        for (std::uint32_t a = 0; a < table.n_face_labels; ++a)
            for (std::uint32_t b = 0; b < table.n_edge_labels; ++b) {
                Json cell = Json::object();
                cell.set("b_label", a + 1);  // 1-based, label 1 = Hamiltonian member
                cell.set("d_label", b + 1);
                Json mons = Json::array();
                for (const WMonomial& m : table.entries[a][b])
                    mons.push(detail::monomial_name(m));
                cell.set("monomials", std::move(mons));
                arr.push(std::move(cell));
            }
        j.set("entries", std::move(arr));
        os << j.dump() << "\n";
    } else {
        if (fmt == OutputFormat::Csv) os << "b_label,d_label,monomials\n";
        TextTable t({"b_label", "d_label", "monomials"});
        for (std::uint32_t a = 0; a < table.n_face_labels; ++a)
            for (std::uint32_t b = 0; b < table.n_edge_labels; ++b) {
                std::string mons;
                for (const WMonomial& m : table.entries[a][b]) {
                    if (!mons.empty()) mons += ' ';
                    mons += detail::monomial_name(m);
                }
                if (fmt == OutputFormat::Csv)
                    os << (a + 1) << ',' << (b + 1) << ',' << mons << '\n';
                else
                    t.add_row({std::to_string(a + 1), std::to_string(b + 1), mons});
            }
        if (fmt == OutputFormat::Table) t.print(os);
    }
    return 0;
}

inline int cmd_fourier(const RunConfig& cfg, std::ostream& os) {
    Model model(cfg.to_model_spec());
    if (cfg.edge >= model.lattice().n_edges()) throw std::invalid_argument("invalid edge id");
    // throws a runtime error (exit 1) if the conjugated operator fails to
    // come out diagonal within tolerance
    EdgeDiagReport rep = diagonalize_edge_op(model, cfg.edge, cfg.tol);

    OutputFormat fmt = cfg.output_format();
    if (fmt == OutputFormat::Json) {
        Json j = detail::spec_header("fourier", cfg);
        j.set("edge", rep.edge);
        j.set("diagonal", true);
        j.set("max_offdiagonal", rep.max_offdiag);
        j.set("max_formula_error", rep.max_formula_err);
        Json arr = Json::array();
        for (std::size_t i = 0; i < rep.labels.size(); ++i) {
            Json row = Json::object();
            row.set("alpha", rep.labels[i][0]);
            row.set("g", rep.labels[i][1]);
            row.set("beta", rep.labels[i][2]);
            row.set("re", rep.eigenvalues[i].real());
            row.set("im", rep.eigenvalues[i].imag());
            arr.push(std::move(row));
        }
        j.set("eigenvalues", std::move(arr));
        os << j.dump() << "\n";
    } else if (fmt == OutputFormat::Csv) {
        os << "alpha,g,beta,re,im\n";
        for (std::size_t i = 0; i < rep.labels.size(); ++i)
            os << rep.labels[i][0] << ',' << rep.labels[i][1] << ',' << rep.labels[i][2] << ','
               << format_float(rep.eigenvalues[i].real()) << ','
               << format_float(rep.eigenvalues[i].imag()) << '\n';
    } else {
        os << "diagonal: true, max off-diagonal " << format_float(rep.max_offdiag)
           << ", max formula error " << format_float(rep.max_formula_err) << "\n";
        TextTable t({"alpha'", "g'", "beta'", "re", "im"});
        for (std::size_t i = 0; i < rep.labels.size(); ++i)
            t.add_row({std::to_string(rep.labels[i][0]), std::to_string(rep.labels[i][1]),
                       std::to_string(rep.labels[i][2]),
                       format_float(rep.eigenvalues[i].real()),
                       format_float(rep.eigenvalues[i].imag())});
        t.print(os);
    }
    return 0;
}

}  // namespace qdlab::cli
