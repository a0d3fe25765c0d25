#include "hilmod/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hilmod::io {

using nlohmann::json;

std::string fmt_real(double x, int digits) {
    if (digits < 1) digits = 1;
    if (digits > 17) digits = 17;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return buf;
}

double round_to_digits(double x, int digits) { return std::strtod(fmt_real(x, digits).c_str(), nullptr); }

std::string fmt_complex_pair(Complex z, int digits) {
    return fmt_real(z.real(), digits) + "," + fmt_real(z.imag(), digits);
}

MomentSequence moments_from_json(const std::string& text) {
    json doc = json::parse(text);
    int vars = doc.at("variables").get<int>();
    MomentTail tail = MomentTail::Reject;
    if (doc.contains("tail")) {
        std::string t = doc.at("tail").get<std::string>();
        if (t == "geometric")
            tail = MomentTail::Geometric;
        else if (t == "reject")
            tail = MomentTail::Reject;
        else
            throw Error("unknown tail rule: " + t);
    }
    std::map<MultiIndex, double> table;
    for (const json& entry : doc.at("moments")) {
        MultiIndex idx = entry.at("index").get<MultiIndex>();
        double value = entry.at("value").get<double>();
        if (!(value > 0.0)) throw Error("moment values must be strictly positive");
        table[idx] = value;
    }
    return MomentSequence::custom(vars, std::move(table), tail);
}

std::string shift_rule_to_json(const WeightedShift& s) {
    json doc;
    if (const std::vector<double>* t = s.table()) {
        doc["kind"] = "table";
        doc["weights"] = *t;
        return doc.dump();
    }
    const WeightRule& rule = *s.rule();
    if (const auto* c = std::get_if<ConstantWeights>(&rule)) {
        if (c->value == 1.0) {
            doc["kind"] = "hardy";
        } else {
            doc["kind"] = "constant";
            doc["value"] = c->value;
        }
        return doc.dump();
    }
    if (const auto* p = std::get_if<PowerRestrictionWeights>(&rule)) {
        switch (p->spec.family()) {
            case KernelFamily::WeightedBergman:
                doc["kind"] = "bergman-power";
                doc["alpha"] = p->spec.alpha();
                doc["m"] = p->m;
                doc["k"] = p->k;
                return doc.dump();
            case KernelFamily::HardyDisk:
                doc["kind"] = "hardy";
                return doc.dump();
            default:
                break;
        }
    }
    throw Error("shift rule has no JSON descriptor; save the weights as CSV instead");
}

WeightedShift shift_from_json(const std::string& text) {
    json doc = json::parse(text);
    std::string kind = doc.at("kind").get<std::string>();
    if (kind == "hardy") return WeightedShift::from_rule(ConstantWeights{1.0});
    if (kind == "constant")
        return WeightedShift::from_rule(ConstantWeights{doc.at("value").get<double>()});
    if (kind == "bergman-power") {
        double alpha = doc.value("alpha", 0.0);
        return restriction_shift(KernelSpec::weighted_bergman(alpha), doc.at("m").get<int>(),
                                 doc.at("k").get<int>());
    }
    if (kind == "hardy-power") {
        return restriction_shift(KernelSpec::hardy_disk(), doc.at("m").get<int>(),
                                 doc.at("k").get<int>());
    }
    if (kind == "table") return WeightedShift::from_table(doc.at("weights").get<std::vector<double>>());
    throw Error("unknown shift kind: " + kind);
}

std::string weights_to_csv(const WeightedShift& s, int count, int digits) {
    std::string out = "index,weight\n";
    int n = std::min(count, s.length());
    for (int l = 0; l < n; ++l)
        out += std::to_string(l) + "," + fmt_real(s.weight(l), digits) + "\n";
    return out;
}

WeightedShift weights_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> weights;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("index", 0) == 0) continue;  // header
        }
        size_t comma = line.find(',');
        if (comma == std::string::npos) throw Error("weight CSV rows need two columns");
        int idx = std::stoi(line.substr(0, comma));
        if (idx != static_cast<int>(weights.size()))
            throw Error("weight CSV indices must be consecutive from 0");
        weights.push_back(std::stod(line.substr(comma + 1)));
    }
    return WeightedShift::from_table(std::move(weights));
}

namespace {

json complex_entry(Complex z, int digits) {
    return {{"re", round_to_digits(z.real(), digits)}, {"im", round_to_digits(z.imag(), digits)}};
}

}  // namespace

std::string curvature_report_to_json(const CurvatureReport& report, int digits) {
    json doc;
    doc["omega"] = {round_to_digits(report.omega.real(), digits),
                    round_to_digits(report.omega.imag(), digits)};
    json rows = json::array();
    for (int i = 0; i < report.matrix.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < report.matrix.cols(); ++j)
            row.push_back(complex_entry(report.matrix(i, j), digits));
        rows.push_back(row);
    }
    doc["matrix"] = rows;
    json eig = json::array();
    for (double e : report.eigenvalues) eig.push_back(round_to_digits(e, digits));
    doc["eigenvalues"] = eig;
    doc["verdict"] =
        report.verdict == LatticeVerdict::FiniteDiscrete ? "finite-discrete" : "indeterminate";
    return doc.dump();
}

std::string hs_fit_to_json(const HilbertSamuelFit& fit) {
    json doc;
    doc["dims"] = fit.dims;
    doc["poly"] = fit.poly_text;
    doc["degree"] = fit.degree;
    doc["stable_from"] = fit.stable_from;
    return doc.dump();
}

std::string hs_dims_to_csv(const HilbertSamuelFit& fit) {
    std::string out = "k,dim\n";
    for (size_t i = 0; i < fit.dims.size(); ++i)
        out += std::to_string(i + 1) + "," + std::to_string(fit.dims[i]) + "\n";
    return out;
}

Eigen::MatrixXcd matrix_from_json(const std::string& text) {
    json doc = json::parse(text);
    const json& rows = doc.at("rows");
    if (!rows.is_array() || rows.empty()) throw Error("matrix JSON needs a non-empty rows array");
    int nr = static_cast<int>(rows.size());
    int nc = static_cast<int>(rows[0].size());
    Eigen::MatrixXcd m(nr, nc);
    for (int i = 0; i < nr; ++i) {
        if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != nc)
            throw Error("matrix JSON rows have unequal lengths");
        for (int j = 0; j < nc; ++j) {
            const json& e = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
            m(i, j) = Complex(e.value("re", 0.0), e.value("im", 0.0));
        }
    }
    return m;
}

std::string matrix_to_json(const Eigen::MatrixXcd& m, int digits) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(complex_entry(m(i, j), digits));
        rows.push_back(row);
    }
    json doc;
    doc["rows"] = rows;
    return doc.dump();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open file for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) throw Error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw Error("atomic rename failed for: " + path);
    }
}

}  // namespace hilmod::io
