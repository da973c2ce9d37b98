#pragma once

// JSON encodings of series and tableaux. Coefficients are strings in the
// coefficient grammar; tree keys use the "[0,1,...]" notation.
//
//   series:  {"kind":"map"|"flow","max_order":N,"empty":"<coeff>",
//             "coefficients":{"[0]":"<coeff>", ...}}
//   tableau: {"A":[["0","0"],["1/(2*alpha)","0"]],"b":["1-alpha","alpha"],
//             "c":["0","1/(2*alpha)"],"symbols":["alpha"]}

#include <string>
#include <string_view>

#include "bsharp/bseries.hpp"
#include "bsharp/butcher.hpp"

namespace bsharp {

/// Keys are written in (order, lex) order.
std::string series_to_json(const TruncatedBSeries& s, int indent = 2);
TruncatedBSeries series_from_json(std::string_view text);

std::string tableau_to_json(const ButcherTableau& tab, int indent = 2);
ButcherTableau tableau_from_json(std::string_view text);

std::string read_text_file(const std::string& path);

}  // namespace bsharp
