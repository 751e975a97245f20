#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "causeway/data.hpp"
#include "causeway/graph.hpp"

namespace causeway {

// Completed partially directed graph. Edge lists are sorted; undirected
// edges are stored with the smaller name first.
struct Cpdag {
    using Edge = std::pair<std::string, std::string>;
    std::vector<std::string> nodes;
    std::vector<Edge> directed;
    std::vector<Edge> undirected;
    bool operator==(const Cpdag&) const = default;
};

class CiOracle {
public:
    virtual ~CiOracle() = default;
    virtual bool independent(const std::string& a, const std::string& b, const std::vector<std::string>& given) const = 0;
};

// d-separation in a known graph.
class GraphOracle : public CiOracle {
public:
    explicit GraphOracle(Admg g) : g_(std::move(g)) {}
    bool independent(const std::string& a, const std::string& b, const std::vector<std::string>& given) const override;

private:
    Admg g_;
};

// G-test at level alpha: independent when the test does not reject.
class DataOracle : public CiOracle {
public:
    DataOracle(const Dataset& d, double alpha);
    bool independent(const std::string& a, const std::string& b, const std::vector<std::string>& given) const override;

private:
    const Dataset& d_;
    double alpha_;
};

// PC-stable: skeleton by increasing separator size, collider orientation
// from the recorded separating sets, then Meek rules 1-3 to a fixpoint.
// Assumes faithfulness and no latent confounders.
Cpdag discover_cpdag(const CiOracle& oracle, std::vector<std::string> vars);

// Graph format with `A -- B` for undirected edges.
std::string serialize_cpdag(const Cpdag& c);
Cpdag parse_cpdag(std::string_view text);

}  // namespace causeway
