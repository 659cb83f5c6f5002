#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "symnet/network.hpp"
#include "symnet/symfun.hpp"

namespace symnet {

// Soft window around an integer weight: the sum of two opposed sigmoids,
// close to +1 when weight == center and below 0.17 in total over all other
// integer weights. Steepness 5 throughout.
double sigmoid_indicator(double center, double weight);

// Tent through zero at the center, built from two relus: -|weight - center|.
double relu_tent(double center, double weight);

// One two-unit block of a weight-counting network. coefficient +1 means the
// block enters the output sum positively, -1 negatively.
struct IndicatorAtom {
    enum class Kind { sigmoid_pair, relu_pair };
    Kind kind = Kind::relu_pair;
    double center = 0.0;
    int coefficient = 1;
};

// One sigmoid_pair atom per support weight, all with coefficient +1.
std::vector<IndicatorAtom> sigmoid_atoms(const SymmetricFunction& f);

// relu_pair atoms: support weights with coefficient +1, midpoints of
// consecutive support weights with coefficient -1. Empty and full supports
// produce no atoms.
std::vector<IndicatorAtom> relu_atoms(const SymmetricFunction& f);

// Width 2n+2 sigmoid network whose sign equals f everywhere; the output
// score stays above 0.34 on the support and below -0.33 off it.
TwoLayerNetwork build_sigmoid_net(const SymmetricFunction& f);

// Width 4n+2 relu network whose hidden layer is bitwise the symmetric_init
// layer; the output score is exactly +0.5 on support weights and at most
// -0.5 elsewhere.
TwoLayerNetwork build_relu_net(const SymmetricFunction& f);

struct CheckRow {
    int weight = 0;
    double score = 0.0;
    int expected = 0;
    bool pass = false;
};

struct CheckReport {
    std::vector<CheckRow> rows;  // one representative per Hamming weight
    bool passed = true;
    // for n <= 12 every input is also checked
    std::uint64_t exhaustive_points = 0;
    std::uint64_t exhaustive_failures = 0;
};

// Signs of the network against f on one representative per weight class,
// plus a full sweep of {0,1}^n when that is small enough to be cheap.
CheckReport verify_representation(const TwoLayerNetwork& net, const SymmetricFunction& f);

// columns: weight,score,expected,pass
void write_csv(const CheckReport& report, std::ostream& out);

}  // namespace symnet
