#include "contstab/ddreal.hpp"

#include "contstab/errors.hpp"

namespace contstab {

namespace {

// Taylor sin on [-pi/4, pi/4]; terms fall below 1e-35 near k = 15.
DD taylor_sin(DD x) {
    DD x2 = x * x;
    DD term = x;
    DD sum = x;
    for (int k = 1; k <= 20; ++k) {
        term = term * x2;
        term = term / static_cast<double>((2 * k) * (2 * k + 1));
        term = -term;
        sum += term;
        if (std::fabs(term.hi) < 1e-40 * std::fabs(sum.hi)) break;
    }
    return sum;
}

DD taylor_cos(DD x) {
    DD x2 = x * x;
    DD term(1.0);
    DD sum(1.0);
    for (int k = 1; k <= 20; ++k) {
        term = term * x2;
        term = term / static_cast<double>((2 * k - 1) * (2 * k));
        term = -term;
        sum += term;
        if (std::fabs(term.hi) < 1e-40 * std::fabs(sum.hi)) break;
    }
    return sum;
}

} // namespace

void dd_sincos(DD theta, DD& s, DD& c) {
    if (theta.hi < -1e-12 || theta >= dd_two_pi + DD(1e-12)) {
        throw NumericalError("dd_sincos: argument outside [0, 2*pi)");
    }
    // Reduce around the nearest multiple of pi/2.
    DD half_pi = dd_pi * DD(0.5);
    int quadrant = static_cast<int>(std::floor(theta.hi / (0.5 * 3.141592653589793) + 0.5));
    DD x = theta - half_pi * DD(static_cast<double>(quadrant));
    DD sx = taylor_sin(x);
    DD cx = taylor_cos(x);
    switch (((quadrant % 4) + 4) % 4) {
        case 0: s = sx;  c = cx;  break;
        case 1: s = cx;  c = -sx; break;
        case 2: s = -sx; c = -cx; break;
        default: s = -cx; c = sx; break;
    }
}

} // namespace contstab
