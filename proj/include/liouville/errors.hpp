#pragma once

#include <stdexcept>
#include <string>

namespace liouville {

// Every failure the library reports derives from Error so callers can catch
// the family at once; the concrete type names the failed precondition.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define LIOUVILLE_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

// exactlin
LIOUVILLE_DEFINE_ERROR(SquareFreeViolation);
LIOUVILLE_DEFINE_ERROR(NotIsolating);

// spectrum_search
LIOUVILLE_DEFINE_ERROR(DegenerateSigma);
LIOUVILLE_DEFINE_ERROR(SingularJacobian);
LIOUVILLE_DEFINE_ERROR(NoConvergence);
LIOUVILLE_DEFINE_ERROR(ComplexTail);
LIOUVILLE_DEFINE_ERROR(SearchExhausted);
LIOUVILLE_DEFINE_ERROR(InvalidRequest);

// contact_kernel
LIOUVILLE_DEFINE_ERROR(OutOfChart);
LIOUVILLE_DEFINE_ERROR(NotConformal);
LIOUVILLE_DEFINE_ERROR(DegenerateForm);
LIOUVILLE_DEFINE_ERROR(ModelError);
LIOUVILLE_DEFINE_ERROR(EigenFailure);
LIOUVILLE_DEFINE_ERROR(UnknownModel);

// torus_builder
LIOUVILLE_DEFINE_ERROR(NonConstantG);
LIOUVILLE_DEFINE_ERROR(DescentViolation);
LIOUVILLE_DEFINE_ERROR(LeftDomain);
LIOUVILLE_DEFINE_ERROR(EmptySection);
LIOUVILLE_DEFINE_ERROR(DegenerateCloud);

#undef LIOUVILLE_DEFINE_ERROR

}  // namespace liouville
