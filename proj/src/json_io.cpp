#include "concfn/json_io.hpp"

#include <sstream>

namespace concfn {

namespace {

json rational_to_json(const Rational& q) {
    if (fits_double(q)) return q.get_d();
    return rational_to_string(q);
}

Rational rational_from_json(const json& j) {
    if (j.is_string()) return rational_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_number()) return rational_from_double(j.get<double>());
    throw std::invalid_argument("expected a rational (number or \"p/q\" string)");
}

}  // namespace

json dist_to_json(const DiscreteDist& dist) {
    json atoms = json::array();
    json weights = json::array();
    for (std::size_t i = 0; i < dist.size(); ++i) {
        atoms.push_back(rational_to_json(dist.position(i)));
        weights.push_back(rational_to_string(dist.weight(i)));
    }
    return json{{"atoms", atoms}, {"weights", weights}};
}

DiscreteDist dist_from_json(const json& j) {
    if (!j.contains("atoms") || !j.contains("weights"))
        throw std::invalid_argument("distribution document needs atoms and weights");
    std::vector<Rational> atoms, weights;
    for (const auto& a : j.at("atoms")) atoms.push_back(rational_from_json(a));
    for (const auto& w : j.at("weights")) weights.push_back(rational_from_json(w));
    return DiscreteDist::make(std::move(atoms), std::move(weights));
}

json weights_to_json(const WeightVector& a) {
    json entries = json::array();
    for (int k = 0; k < a.n(); ++k) {
        if (a.d() == 1) {
            entries.push_back(a.coord(k, 0));
        } else {
            json e = json::array();
            for (int j = 0; j < a.d(); ++j) e.push_back(a.coord(k, j));
            entries.push_back(e);
        }
    }
    return json{{"d", a.d()}, {"entries", entries}};
}

WeightVector weights_from_json(const json& j) {
    if (!j.contains("entries"))
        throw std::invalid_argument("weight vector document needs entries");
    const int d = j.value("d", 1);
    std::vector<std::vector<double>> entries;
    for (const auto& e : j.at("entries")) {
        if (e.is_array()) {
            entries.push_back(e.get<std::vector<double>>());
        } else {
            if (d != 1)
                throw std::invalid_argument("scalar entries need d = 1");
            entries.push_back({e.get<double>()});
        }
    }
    return WeightVector::make(d, std::move(entries));
}

json gap_to_json(const SymmetricGAP& k) {
    json gens = json::array();
    for (int j = 0; j < k.rank(); ++j) {
        json g = json::array();
        for (double v : k.generator(j)) g.push_back(v);
        gens.push_back(g);
    }
    json limits = json::array();
    for (int j = 0; j < k.rank(); ++j) limits.push_back(k.limit(j));
    return json{{"d", k.dim()}, {"generators", gens}, {"limits", limits}};
}

SymmetricGAP gap_from_json(const json& j) {
    const int d = j.value("d", 1);
    std::vector<std::vector<double>> gens;
    for (const auto& g : j.at("generators")) {
        if (g.is_array())
            gens.push_back(g.get<std::vector<double>>());
        else
            gens.push_back({g.get<double>()});
    }
    auto limits = j.at("limits").get<std::vector<double>>();
    return SymmetricGAP::make(d, std::move(gens), std::move(limits));
}

json measure_to_json(const AtomicMeasure& w) {
    json positions = json::array();
    json masses = json::array();
    for (std::size_t i = 0; i < w.size(); ++i) {
        json p = json::array();
        for (double v : w.position(i)) p.push_back(v);
        positions.push_back(p);
        masses.push_back(rational_to_string(w.mass(i)));
    }
    return json{{"d", w.dim()}, {"positions", positions}, {"masses", masses}};
}

AtomicMeasure measure_from_json(const json& j) {
    const int d = j.value("d", 1);
    std::vector<std::vector<double>> positions;
    for (const auto& p : j.at("positions")) {
        if (p.is_array())
            positions.push_back(p.get<std::vector<double>>());
        else
            positions.push_back({p.get<double>()});
    }
    std::vector<Rational> masses;
    for (const auto& m : j.at("masses")) masses.push_back(rational_from_json(m));
    return AtomicMeasure::make(d, std::move(positions), std::move(masses));
}

json concentration_to_json(const ConcentrationResult& r) {
    json out{{"method", r.method == QMethod::exact ? "exact" : "monte-carlo"},
             {"stderr", r.stderr_value},
             {"center", r.center}};
    if (r.exact)
        out["value"] = rational_to_string(*r.exact);
    else
        out["value"] = r.value;
    out["value_float"] = r.value;
    return out;
}

json coverage_to_json(const CoverageReport& r) {
    return json{{"covered_count", r.covered_count},
                {"uncovered_indices", r.uncovered_indices},
                {"tolerance", r.tolerance},
                {"norm", r.norm == Norm::max ? "max" : "euclidean"}};
}

json bound_report_to_json(const BoundReport& r) {
    return json{{"inequality_id", inequality_id_name(r.id)},
                {"lhs", r.lhs},
                {"rhs_unconstanted", r.rhs_unconstanted},
                {"implied_constant", r.implied_constant},
                {"params", r.params},
                {"flags", r.flags}};
}

BoundReport bound_report_from_json(const json& j) {
    BoundReport r;
    r.id = inequality_id_from_name(j.at("inequality_id").get<std::string>());
    r.lhs = j.at("lhs").get<double>();
    r.rhs_unconstanted = j.at("rhs_unconstanted").get<double>();
    r.implied_constant = j.at("implied_constant").get<double>();
    r.params = j.at("params").get<std::map<std::string, std::string>>();
    r.flags = j.at("flags").get<std::vector<std::string>>();
    return r;
}

json mass_at_zero_to_json(const MassAtZeroResult& r) {
    return json{{"value", r.value},
                {"enumerated", r.enumerated},
                {"certified_radius", r.certified_radius},
                {"stderr", r.stderr_value}};
}

json esseen_to_json(const EsseenResult& r) {
    return json{{"integral", r.integral},
                {"bound", r.bound},
                {"converged", r.converged},
                {"intervals", r.intervals}};
}

json inverse_report_to_json(const InversePrincipleReport& r) {
    json out{{"rank", r.rank},
             {"cardinality", r.cardinality.get_str()},
             {"coverage", coverage_to_json(r.coverage)},
             {"q_values", r.q_values},
             {"cardinality_components", r.cardinality_components},
             {"params", r.params},
             {"flags", r.flags},
             {"ratios", r.ratios}};
    if (r.fitted) out["fitted"] = gap_to_json(*r.fitted);
    return out;
}

json region_report_to_json(const RegionWitnessReport& r) {
    return json{{"rank_bound", bound_report_to_json(r.rank_bound)},
                {"mass_bound", bound_report_to_json(r.mass_bound)},
                {"blocks", r.blocks},
                {"deltas", r.deltas},
                {"block_ranks", r.block_ranks},
                {"mass_outside", rational_to_string(r.mass_outside)},
                {"consequence_covered", r.consequence_covered},
                {"q_values", r.q_values},
                {"flags", r.flags}};
}

json planted_to_json(const PlantedInstance& inst) {
    return json{{"a", weights_to_json(inst.a)},
                {"truth", gap_to_json(inst.truth)},
                {"noise", inst.noise},
                {"outlier_fraction", inst.outlier_fraction},
                {"seed", inst.seed},
                {"outlier_indices", inst.outlier_indices}};
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

std::string bound_report_csv_header() {
    return "inequality_id,lhs,rhs_unconstanted,implied_constant,flags,params\n";
}

std::string bound_report_csv_row(const BoundReport& r) {
    std::ostringstream params;
    bool first = true;
    for (const auto& [k, v] : r.params) {
        if (!first) params << ";";
        params << k << "=" << v;
        first = false;
    }
    std::ostringstream flags;
    first = true;
    for (const auto& f : r.flags) {
        if (!first) flags << ";";
        flags << f;
        first = false;
    }
    std::ostringstream row;
    row << inequality_id_name(r.id) << "," << format_double(r.lhs) << ","
        << format_double(r.rhs_unconstanted) << "," << format_double(r.implied_constant) << ","
        << csv_escape(flags.str()) << "," << csv_escape(params.str()) << "\n";
    return row.str();
}

}  // namespace concfn
