#include "ssdm/kernels.hpp"

#include <cmath>

#include "ssdm/errors.hpp"

namespace ssdm {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kGaussCut = 4.0; // truncation point of the Gaussian family

} // namespace

double kernel_eval(const KernelSpec& spec, double t) {
    const double t2 = t * t;
    switch (spec.family) {
    case KernelFamily::Epanechnikov:
        return t2 < 1.0 ? 0.75 * (1.0 - t2) : 0.0;
    case KernelFamily::Quartic: {
        if (t2 >= 1.0) return 0.0;
        const double one_m = 1.0 - t2;
        return 0.9375 * one_m * one_m;
    }
    case KernelFamily::Gaussian:
        return t2 <= kGaussCut * kGaussCut ? kInvSqrt2Pi * std::exp(-0.5 * t2)
                                           : 0.0;
    }
    return 0.0;
}

double scaled_kernel(const KernelSpec& spec, double dist, double h) {
    return kernel_eval(spec, dist / h) / (h * h);
}

KernelConstants kernel_constants(const KernelSpec& spec) {
    switch (spec.family) {
    case KernelFamily::Epanechnikov:
        return {
            0.75,            // k0
            0.6,             // nu_star = 3/5
            3.0 * kPi / 8.0, // kappa0
            kPi / 16.0,      // kappa2
            3.0 * kPi / 16.0,  // nu0
            3.0 * kPi / 128.0, // nu2
        };
    case KernelFamily::Quartic:
        return {
            0.9375,            // k0 = 15/16
            5.0 / 7.0,         // nu_star
            5.0 * kPi / 16.0,  // kappa0
            5.0 * kPi / 128.0, // kappa2
            45.0 * kPi / 256.0,  // nu0
            15.0 * kPi / 1024.0, // nu2
        };
    case KernelFamily::Gaussian: {
        const double e8 = std::exp(-8.0);
        const double e16 = std::exp(-16.0);
        return {
            kInvSqrt2Pi,
            std::erf(4.0) / (2.0 * std::sqrt(kPi)),
            std::sqrt(2.0 * kPi) * (1.0 - e8),
            std::sqrt(kPi / 2.0) * (2.0 - 18.0 * e8),
            (1.0 - e16) / 2.0,
            (1.0 - 17.0 * e16) / 4.0,
        };
    }
    }
    throw NumericError("unknown kernel family");
}

KernelFamily kernel_family_from_name(const std::string& name) {
    if (name == "epanechnikov") return KernelFamily::Epanechnikov;
    if (name == "quartic") return KernelFamily::Quartic;
    if (name == "gaussian") return KernelFamily::Gaussian;
    throw DataError("unknown kernel family '" + name +
                    "' (expected epanechnikov, quartic, or gaussian)");
}

std::string kernel_family_name(KernelFamily family) {
    switch (family) {
    case KernelFamily::Epanechnikov:
        return "epanechnikov";
    case KernelFamily::Quartic:
        return "quartic";
    case KernelFamily::Gaussian:
        return "gaussian";
    }
    return "unknown";
}

} // namespace ssdm
