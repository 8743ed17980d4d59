//! Every example under `examples/` runs to completion.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        #[path = $file]
        mod $name;

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(maksimov_products, "../examples/maksimov_products.rs");
example!(algebra_analysis, "../examples/algebra_analysis.rs");
example!(exponential_flow, "../examples/exponential_flow.rs");
example!(power_and_idempotent_flows, "../examples/power_and_idempotent_flows.rs");
example!(invertible_and_product, "../examples/invertible_and_product.rs");
example!(maksimov_flows, "../examples/maksimov_flows.rs");
example!(pde_check, "../examples/pde_check.rs");
example!(evolve_csv, "../examples/evolve_csv.rs");
