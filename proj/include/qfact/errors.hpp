// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace qfact {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A scalar argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

class NotPsd : public Error {
 public:
  using Error::Error;
};

/// The 2x2 block matrix handed to the positivity witness is not PSD.
class NoWitness : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// No scalars a, b make (T - aI)(T - bI) vanish within tolerance.
class NotQuadratic : public Error {
 public:
  using Error::Error;
};

/// Some singular value sits too close to the rank cutoff to classify.
class RankAmbiguous : public Error {
 public:
  using Error::Error;
};

class NotUpperTriangular : public Error {
 public:
  using Error::Error;
};

/// A constructed factorization failed its own certificate.
class CertificateFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace qfact
