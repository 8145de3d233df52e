#pragma once

#include <string>
#include <utility>
#include <vector>

#include "carnot/endpoint.hpp"
#include "carnot/structure.hpp"

namespace carnot {

inline constexpr const char* kStructureSchema = "carnot-structure/1";
inline constexpr const char* kFormsSchema = "carnot-forms/1";
inline constexpr const char* kControlSchema = "carnot-control/1";

// JSON documents. Parse failures throw Error(Parse) with "<source>:<line>: ..."
// pointing at the offending token or field. Matrices are lists of rows; a flat
// row-major list of d*d numbers is accepted too.
//
// structure: {"schema": "carnot-structure/1", "d": 2, "l": 1, "matrices": [[[0, 1], [-1, 0]]]}
// forms:     {"schema": "carnot-forms/1", "N": 3, "q1": [...], "q2": [...]}
// control:   {"schema": "carnot-control/1", "d": 2, "L": 1, "mean": [0, 0],
//             "coeffs": [[[U_1...], [V_1...]], ...]}
CarnotStructure parse_structure(const std::string& text, const std::string& source = "<input>");
std::pair<Mat, Mat> parse_forms(const std::string& text, const std::string& source = "<input>");
Control parse_control(const std::string& text, const std::string& source = "<input>");

std::string structure_to_json(const CarnotStructure& W);
std::string forms_to_json(const Mat& q1, const Mat& q2);
std::string control_to_json(const Control& u);

std::string read_file(const std::string& path);

// "%.12g"
std::string fmt_real(double x);
// comma-separated reals, as given to --p, --omega, --u0
Vec parse_real_list(const std::string& s, const std::string& flag);
std::string join_reals(const Vec& v, const char* sep = ";");

}  // namespace carnot
