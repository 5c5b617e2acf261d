#pragma once

#include <string>

namespace ssdm {

enum class KernelFamily {
    Epanechnikov, // K(t) = 0.75 (1 - t^2)_+
    Quartic,      // K(t) = (15/16) (1 - t^2)^2_+
    Gaussian,     // K(t) = phi(t) truncated at |t| <= 4
};

// Analytic functionals of a kernel family. All are exact closed forms; the
// unit tests re-derive them by quadrature.
//   k0       K(0)
//   nu_star  integral of K(t)^2 dt (univariate)
//   kappa0   integral of K(|s|) ds over R^2
//   kappa2   integral of s1^2 K(|s|) ds over R^2
//   nu0      integral of K(|s|)^2 ds over R^2
//   nu2      integral of s1^2 K(|s|)^2 ds over R^2
struct KernelConstants {
    double k0;
    double nu_star;
    double kappa0;
    double kappa2;
    double nu0;
    double nu2;
};

struct KernelSpec {
    KernelFamily family = KernelFamily::Epanechnikov;
};

// K(t) at signed argument t (univariate profile of the radial kernel).
double kernel_eval(const KernelSpec& spec, double t);

// Bivariate scaling K_h(d) = K(d/h) / h^2 at distance d >= 0.
double scaled_kernel(const KernelSpec& spec, double dist, double h);

KernelConstants kernel_constants(const KernelSpec& spec);

// Name <-> family mapping used by the CLI and serialized outputs.
KernelFamily kernel_family_from_name(const std::string& name); // throws DataError
std::string kernel_family_name(KernelFamily family);

} // namespace ssdm
