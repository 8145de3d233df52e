#include "carnot/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace carnot {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, size_t off) {
    off = std::min(off, text.size());
    int line = 1;
    for (size_t k = 0; k < off; ++k) line += text[k] == '\n';
    return line;
}

// first line mentioning "key"; 1 when absent
int line_of_key(const std::string& text, const std::string& key) {
    const size_t at = text.find("\"" + key + "\"");
    return at == std::string::npos ? 1 : line_of_offset(text, at);
}

struct Doc {
    const std::string& text;
    const std::string& source;
    json j;

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_of_key(text, key)) + ": " + msg);
    }

    const json& field(const std::string& key) const {
        if (!j.contains(key)) fail(key, "missing field '" + key + "'");
        return j.at(key);
    }

    int integer(const std::string& key) const {
        const json& v = field(key);
        if (!v.is_number_integer()) fail(key, "field '" + key + "' must be an integer");
        return v.get<int>();
    }

    Vec vector(const json& v, const std::string& key, int n) const {
        if (!v.is_array() || static_cast<int>(v.size()) != n)
            fail(key, "field '" + key + "' must be a list of " + std::to_string(n) + " numbers");
        Vec out(n);
        for (int i = 0; i < n; ++i) {
            if (!v[i].is_number()) fail(key, "field '" + key + "' holds a non-number");
            out(i) = v[i].get<double>();
        }
        return out;
    }

    Mat matrix(const json& v, const std::string& key, int n) const {
        if (!v.is_array()) fail(key, "field '" + key + "' must be a matrix");
        Mat M(n, n);
        if (static_cast<int>(v.size()) == n * n && (n * n == 0 || v[0].is_number())) {
            Vec flat = vector(v, key, n * n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) M(r, c) = flat(r * n + c);
            return M;
        }
        if (static_cast<int>(v.size()) != n)
            fail(key, "field '" + key + "' must have " + std::to_string(n) + " rows");
        for (int r = 0; r < n; ++r) M.row(r) = vector(v[r], key, n).transpose();
        return M;
    }

    void schema(const char* want) const {
        const json& s = field("schema");
        if (!s.is_string() || s.get<std::string>() != want)
            fail("schema", std::string("schema must be \"") + want + "\"");
    }
};

Doc load(const std::string& text, const std::string& source) {
    try {
        json j = json::parse(text);
        if (!j.is_object()) throw Error(ErrorKind::Parse, source + ":1: top level must be an object");
        return Doc{text, source, std::move(j)};
    } catch (const json::parse_error& e) {
        // e.byte is 1-based and points just past the bad token
        const size_t off = e.byte > 0 ? e.byte - 1 : 0;
        std::string msg = e.what();
        const size_t cut = msg.find("parse error");
        if (cut != std::string::npos) msg = msg.substr(cut);
        throw Error(ErrorKind::Parse, source + ":" + std::to_string(line_of_offset(text, off)) + ": " + msg);
    }
}

json matrix_json(const Mat& M) {
    json rows = json::array();
    for (int r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(row);
    }
    return rows;
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

}  // namespace

CarnotStructure parse_structure(const std::string& text, const std::string& source) {
    Doc D = load(text, source);
    D.schema(kStructureSchema);
    CarnotStructure W;
    W.d = D.integer("d");
    W.l = D.integer("l");
    if (W.d < 1 || W.l < 1) D.fail("d", "d and l must be positive");
    const json& ms = D.field("matrices");
    if (!ms.is_array() || static_cast<int>(ms.size()) != W.l)
        D.fail("matrices", "field 'matrices' must list l = " + std::to_string(W.l) + " matrices");
    for (int k = 0; k < W.l; ++k) W.matrices.push_back(D.matrix(ms[k], "matrices", W.d));
    return W;
}

std::pair<Mat, Mat> parse_forms(const std::string& text, const std::string& source) {
    Doc D = load(text, source);
    D.schema(kFormsSchema);
    const int N = D.integer("N");
    if (N < 1) D.fail("N", "N must be positive");
    return {D.matrix(D.field("q1"), "q1", N), D.matrix(D.field("q2"), "q2", N)};
}

Control parse_control(const std::string& text, const std::string& source) {
    Doc D = load(text, source);
    D.schema(kControlSchema);
    const int d = D.integer("d"), L = D.integer("L");
    if (d < 1 || L < 0) D.fail("L", "need d >= 1 and L >= 0");
    Control u = Control::zero(d, L);
    if (D.j.contains("mean")) u.mean = D.vector(D.j.at("mean"), "mean", d);
    const json& cs = D.field("coeffs");
    if (!cs.is_array() || static_cast<int>(cs.size()) != L)
        D.fail("coeffs", "field 'coeffs' must hold L = " + std::to_string(L) + " [U_k, V_k] pairs");
    for (int k = 0; k < L; ++k) {
        if (!cs[k].is_array() || cs[k].size() != 2) D.fail("coeffs", "each coeffs entry must be [U_k, V_k]");
        u.U[k] = D.vector(cs[k][0], "coeffs", d);
        u.V[k] = D.vector(cs[k][1], "coeffs", d);
    }
    return u;
}

std::string structure_to_json(const CarnotStructure& W) {
    json j;
    j["schema"] = kStructureSchema;
    j["d"] = W.d;
    j["l"] = W.l;
    j["matrices"] = json::array();
    for (const Mat& A : W.matrices) j["matrices"].push_back(matrix_json(A));
    return j.dump(2) + "\n";
}

std::string forms_to_json(const Mat& q1, const Mat& q2) {
    json j;
    j["schema"] = kFormsSchema;
    j["N"] = q1.rows();
    j["q1"] = matrix_json(q1);
    j["q2"] = matrix_json(q2);
    return j.dump(2) + "\n";
}

std::string control_to_json(const Control& u) {
    json j;
    j["schema"] = kControlSchema;
    j["d"] = u.d();
    j["L"] = u.L;
    j["mean"] = vec_json(u.mean);
    j["coeffs"] = json::array();
    for (int k = 0; k < u.L; ++k) j["coeffs"].push_back(json::array({vec_json(u.U[k]), vec_json(u.V[k])}));
    return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Parse, path + ":0: cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);  // no "-0"
    return buf;
}

Vec parse_real_list(const std::string& s, const std::string& flag) {
    std::vector<double> xs;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t used = 0;
        double x;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Parse, flag + ": '" + item + "' is not a number");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size()) throw Error(ErrorKind::Parse, flag + ": '" + item + "' is not a number");
        xs.push_back(x);
    }
    if (xs.empty()) throw Error(ErrorKind::Parse, flag + ": empty list");
    return Eigen::Map<Vec>(xs.data(), static_cast<int>(xs.size()));
}

std::string join_reals(const Vec& v, const char* sep) {
    std::string out;
    for (int i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += fmt_real(v(i));
    }
    return out;
}

}  // namespace carnot
