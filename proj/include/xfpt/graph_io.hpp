#ifndef XFPT_GRAPH_IO_HPP
#define XFPT_GRAPH_IO_HPP

#include <string>

#include <json.hpp>

#include "xfpt/network.hpp"

namespace xfpt {

struct Problem {
  Network network;
  Query query;
};

// Graph file schema:
//   {
//     "nodes": V,
//     "mode": "markov" | "general",
//     "edges": [ {"from": i, "to": j, "rate": q}                        (markov)
//              | {"from": i, "to": j, "prob": p, "waiting": {...}} ],   (general)
//     "rho": { "<node>": weight, ... },
//     "targets": [ ... ]
//   }
// waiting: {"kind": "exponential", "rate": c}
//        | {"kind": "shifted_stretched", "t0": a, "c": b, "r": r}
//        | {"kind": "lomax", "alpha": a, "beta": b}
// rho weights are normalized on load when they sum to 1 within 1e-6,
// otherwise the file is rejected.
Problem parse_problem(const nlohmann::json& doc);
Problem load_problem(const std::string& path);

nlohmann::json to_json(const Network& network, const Query& query);
void save_problem(const Network& network, const Query& query, const std::string& path);

}  // namespace xfpt

#endif  // XFPT_GRAPH_IO_HPP
