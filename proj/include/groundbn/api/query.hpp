#pragma once
// Session queries rendered as reports; shared by the CLI and the service.

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "groundbn/api/report.hpp"
#include "groundbn/session/session.hpp"

namespace groundbn::api {

// Report on `nodes` (default: the session's query set) with `overlay` added
// on top of the live evidence. IHB is queried alongside D_v so the report
// can carry P(IHB = yes).
inline PosteriorReport report_for(const session::IncidentSession& s, std::span<const session::Evidence> overlay,
                                  std::vector<std::string> nodes = {}) {
    if (nodes.empty()) nodes = session::default_query(s.network());
    for (const auto& n : nodes)
        if (!s.network().contains(n)) throw Error(ErrorCode::UnknownNode, "'" + n + "' is not part of this model", "nodes");
    auto q = nodes;
    if (std::find(q.begin(), q.end(), "D_v") != q.end() && s.network().contains("IHB") &&
        std::find(q.begin(), q.end(), "IHB") == q.end())
        q.push_back("IHB");
    auto p = s.what_if(overlay, q);
    return make_report(s.network(), p.marginals, nodes, p.log_evidence, p.warnings);
}

// "D_t,D_v, Y_D" -> {"D_t", "D_v", "Y_D"}; empty items are dropped.
inline std::vector<std::string> split_nodes(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        auto item = text.substr(pos, end - pos);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.emplace_back(item);
        pos = end + 1;
    }
    return out;
}

}  // namespace groundbn::api
