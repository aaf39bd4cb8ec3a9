#pragma once

#include <string>

#include "glpin/field.hpp"

namespace glpin {

// Binary field container: fixed header (magic, dims, spacing, origin, domain
// kind, component count) followed by the node kind bytes and the row-major
// payload.  Complex payloads are interleaved re/im.

void save_field(const ComplexField& f, const std::string& path);
void save_field(const ScalarField& f, const std::string& path);
ComplexField load_complex_field(const std::string& path);
ScalarField load_scalar_field(const std::string& path);

/// CSV rows "x,y,re,im" (im omitted for scalar fields) over nodes carrying values.
void save_csv(const ComplexField& f, const std::string& path);
void save_csv(const ScalarField& f, const std::string& path);

} // namespace glpin
