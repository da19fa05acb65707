#include "metrokit/serialize.hpp"

#include <cstdio>

namespace metrokit::serialize {

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json j;
    j["dim"] = static_cast<int>(m.rows());
    if (m.rows() != m.cols())
        throw std::invalid_argument("matrix_to_json: expected a square matrix");
    auto part = [&](auto&& f) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(f(m(i, k)));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["re"] = part([](Cplx z) { return z.real(); });
    j["im"] = part([](Cplx z) { return z.imag(); });
    return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const int dim = j.at("dim").get<int>();
    Matrix m(dim, dim);
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (static_cast<int>(re.size()) != dim || static_cast<int>(im.size()) != dim)
        throw std::invalid_argument("matrix_from_json: row count mismatch");
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k)
            m(i, k) = Cplx(re[i][k].get<double>(), im[i][k].get<double>());
    return m;
}

nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json j;
    j["dim"] = static_cast<int>(v.size());
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        re.push_back(v(i).real());
        im.push_back(v(i).imag());
    }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j;
}

Vector vector_from_json(const nlohmann::json& j) {
    const int dim = j.at("dim").get<int>();
    Vector v(dim);
    for (int i = 0; i < dim; ++i)
        v(i) = Cplx(j.at("re")[i].get<double>(), j.at("im")[i].get<double>());
    return v;
}

nlohmann::json kraus_to_json(const qcore::KrausChannel& channel) {
    nlohmann::json j;
    j["dim_in"] = channel.dim_in;
    j["dim_out"] = channel.dim_out;
    j["kraus"] = nlohmann::json::array();
    for (const auto& k : channel.kraus) j["kraus"].push_back(matrix_to_json(k));
    return j;
}

qcore::KrausChannel kraus_from_json(const nlohmann::json& j) {
    std::vector<Matrix> ops;
    for (const auto& jk : j.at("kraus")) ops.push_back(matrix_from_json(jk));
    return qcore::KrausChannel(std::move(ops));
}

nlohmann::json code_pair_to_json(const qec::CodePair& code) {
    nlohmann::json j;
    j["system_dim"] = code.system_dim;
    j["ancilla_dim"] = code.ancilla_dim;
    j["c0"] = vector_to_json(code.c0);
    j["c1"] = vector_to_json(code.c1);
    return j;
}

qec::CodePair code_pair_from_json(const nlohmann::json& j) {
    qec::CodePair code;
    code.system_dim = j.at("system_dim").get<int>();
    code.ancilla_dim = j.at("ancilla_dim").get<int>();
    code.c0 = vector_from_json(j.at("c0"));
    code.c1 = vector_from_json(j.at("c1"));
    return code;
}

namespace {

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void dump_value(const nlohmann::json& j, std::string& out, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent) * depth, ' ');
    const std::string pad_in(static_cast<std::size_t>(indent) * (depth + 1), ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in + nlohmann::json(it.key()).dump() + ": ";
                dump_value(it.value(), out, indent, depth + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& item : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                dump_value(item, out, indent, depth + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case nlohmann::json::value_t::number_float:
            out += format_double(j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
    std::string out;
    dump_value(j, out, indent, 0);
    out += "\n";
    return out;
}

}  // namespace metrokit::serialize
