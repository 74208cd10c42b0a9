#pragma once

// Built-in contact models with their contractions:
//   jet_space        (z, q, p), alpha = dz - p dq, phi = (z/2, q, p/2)
//   solenoid         (theta, x, y), alpha = dx + y dtheta,
//                    phi = (2 theta, x/10 + cos(theta)/2, (y/10 + sin(theta)/2)/2)
//   transverse_knot  (theta, x, y), alpha = dtheta - y dx, mapped into the
//                    Legendrian chart (theta', x', y') with alpha = dx' + y' dtheta'
//   anosov           (y_1..y_{n-1}, x_1..x_n), alpha = beta_n + sum y_i beta_i,
//                    phi = (lambda_n / lambda_i y_i, A x)

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liouville/contact_kernel.hpp"
#include "liouville/exactlin.hpp"
#include "liouville/spectrum_search.hpp"

namespace liouville::contact {

ContactModel jet_space_model();
ContactModel solenoid_model();
// Requires 0 < delta < c (so the image stays finite) and eps > 0; the
// contraction property itself is left to certification.
ContactModel transverse_knot_model(double c = 0.1, double delta = 0.001, double eps = 0.5);

// name in {jet_space, solenoid, transverse_knot}; dashes are accepted in
// place of underscores. Transverse-knot params: c, delta, eps.
ContactModel builtin_model(const std::string& name, const std::map<std::string, double>& params = {});
std::vector<std::string> builtin_model_names();

struct AnosovEigenforms {
    // lambda_1..lambda_{n-1} by decreasing magnitude, then lambda_n, the
    // smallest in magnitude.
    std::vector<double> eigenvalues;
    // Column i holds beta_i: unit norm, first nonzero entry positive,
    // A^T beta_i = lambda_i beta_i.
    Eigen::MatrixXd betas;
    double relation_residual = 0.0;  // max_i |A^T beta_i - lambda_i beta_i|_inf
};

// Throws EigenFailure unless the spectrum is real and simple with
// 0 < lambda_n < |lambda_i|, or when the eigenform relation fails to 1e-8.
AnosovEigenforms anosov_eigenforms(const exactlin::IntMatrix& a);

ContactModel anosov_model(const exactlin::IntMatrix& a);
ContactModel anosov_model(const spectrum::SpectrumCertificate& cert);

}  // namespace liouville::contact
