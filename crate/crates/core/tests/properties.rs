mod common;

use common::properties::{all, CASES};

fn run(name: &str) {
    let suite = all().into_iter().find(|s| s.name == name).unwrap();
    match (suite.run)(CASES) {
        Ok(note) => println!("{name}: {CASES} cases ok {note}"),
        Err(e) => panic!("{name}: {e}"),
    }
}

macro_rules! suites {
    ($($test:ident => $name:literal),* $(,)?) => {
        $(#[test]
        fn $test() {
            run($name);
        })*
    };
}

suites! {
    validate_closure => "validate closure of constructors",
    double_dual => "D∘D = id",
    truncation_identity => "M[-n]_{≥k} = M_{≥k-n}[-n]",
    ext_into_radical_power => "Ext¹(M,N)_0 = Ext¹(M,J^{l-k}N)_0",
    two_out_of_three => "two out of three for bundles",
    radical_closure => "JX[1] of a bundle is a bundle",
    simple_iff_bundle => "quasi co-Koszul: bundle iff simple",
    ext_two_ways => "Ext two ways",
    dual_star_of_syzygy => "(D(Ω^kK))^*[r+1] ≅ Ω^kK",
    module_file_round_trip => "module file round trip",
}
