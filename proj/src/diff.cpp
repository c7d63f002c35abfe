#include "dtac/diff.hpp"

#include <algorithm>
#include <vector>

namespace dtac {

namespace {

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < s.size()) {
        std::size_t nl = s.find('\n', start);
        if (nl == std::string_view::npos) nl = s.size();
        out.emplace_back(s.substr(start, nl - start));
        start = nl + 1;
    }
    return out;
}

struct Op {
    char tag;  // ' ', '-', '+'
    std::size_t a, b;  // line indices in before/after
};

std::vector<Op> edit_script(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    std::vector<Op> ops;
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && a[i] == b[j]) {
            ops.push_back({' ', i++, j++});
        } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
            ops.push_back({'-', i++, j});
        } else {
            ops.push_back({'+', i, j++});
        }
    }
    return ops;
}

} // namespace

std::string unified_diff(std::string_view before, std::string_view after, std::string_view from,
                         std::string_view to, int context) {
    auto a = split_lines(before);
    auto b = split_lines(after);
    auto ops = edit_script(a, b);
    const std::size_t ctx = static_cast<std::size_t>(std::max(context, 0));

    std::string out;
    std::size_t k = 0;
    while (k < ops.size()) {
        if (ops[k].tag == ' ') {
            ++k;
            continue;
        }
        // Hunk: extend while changes are within 2*ctx lines of each other.
        std::size_t start = k >= ctx ? k - ctx : 0;
        std::size_t end = k;
        std::size_t gap = 0;
        for (std::size_t t = k; t < ops.size(); ++t) {
            if (ops[t].tag != ' ') {
                end = t;
                gap = 0;
            } else if (++gap > 2 * ctx) {
                break;
            }
        }
        std::size_t stop = std::min(ops.size(), end + 1 + ctx);
        std::size_t a0 = ops[start].a, b0 = ops[start].b, na = 0, nb = 0;
        std::string body;
        for (std::size_t t = start; t < stop; ++t) {
            const Op& o = ops[t];
            if (o.tag != '+') ++na;
            if (o.tag != '-') ++nb;
            body += o.tag;
            body += o.tag == '+' ? b[o.b] : a[o.a];
            body += '\n';
        }
        if (out.empty()) out = "--- " + std::string(from) + "\n+++ " + std::string(to) + "\n";
        out += "@@ -" + std::to_string(na ? a0 + 1 : a0) + "," + std::to_string(na) + " +" +
               std::to_string(nb ? b0 + 1 : b0) + "," + std::to_string(nb) + " @@\n" + body;
        k = stop;
    }
    return out;
}

} // namespace dtac
