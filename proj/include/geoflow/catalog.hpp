#pragma once

#include "geoflow/surface.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace geoflow {

struct CatalogEntry {
  std::string name;
  std::string formula;
  Regularity regularity;
  ChartDomain domain;
  // Closed-form facts the test-suite uses as oracles.
  std::vector<std::string> facts;
};

struct CatalogParams {
  double alpha = 0.5;  // exponent for c2alpha
  std::optional<ChartDomain> domain;
};

std::vector<std::string> catalog_names();
CatalogEntry catalog_entry(const std::string& name, const CatalogParams& params = {});

// Throws UnknownSurface for names not in catalog_names().
GraphSurface make_catalog_surface(const std::string& name, const CatalogParams& params = {});

// h = 0 on R^m with codimension c.
class FlatField : public HeightField {
 public:
  FlatField(int dim, int codim) : dim_(dim), codim_(codim) {}
  int dim() const override { return dim_; }
  int codim() const override { return codim_; }
  HeightJet jet(const Vector& x) const override;
  std::optional<ThirdDerivatives> third(const Vector& x) const override;

 private:
  int dim_;
  int codim_;
};

// Upper unit hemisphere h = sqrt(1 - |x|^2).
class HemisphereField : public HeightField {
 public:
  explicit HemisphereField(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  int codim() const override { return 1; }
  HeightJet jet(const Vector& x) const override;
  std::optional<ThirdDerivatives> third(const Vector& x) const override;

 private:
  int dim_;
};

// Codimension-one graph of a profile in the first coordinate, h(x) = f(x_1).
class ProfileField : public HeightField {
 public:
  using Fn = std::function<double(double)>;
  ProfileField(int dim, Fn f, Fn df, Fn d2f, Fn d3f = nullptr)
      : dim_(dim), f_(std::move(f)), df_(std::move(df)), d2f_(std::move(d2f)), d3f_(std::move(d3f)) {}

  int dim() const override { return dim_; }
  int codim() const override { return 1; }
  HeightJet jet(const Vector& x) const override;
  Vector value(const Vector& x) const override;
  std::optional<ThirdDerivatives> third(const Vector& x) const override;

 private:
  int dim_;
  Fn f_, df_, d2f_, d3f_;
};

}  // namespace geoflow
