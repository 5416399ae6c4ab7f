//! Parses an XCSP3-core instance and writes it back in canonical form.

use xcsp_mini::xcsp::{parse_instance, write_instance};

const INSTANCE: &str = r#"<instance format="XCSP3" type="CSP">
  <variables>
    <array id="x" size="[3]"> 1..3 </array>
  </variables>
  <constraints>
    <allDifferent> x[] </allDifferent>
    <intension> lt(x[0],x[2]) </intension>
  </constraints>
</instance>"#;

fn main() {
    let instance = parse_instance(INSTANCE).expect("well-formed instance");
    println!(
        "{} variables, {} constraints",
        instance.variables.len(),
        instance.constraints.len()
    );
    let xml = write_instance(&instance).expect("writable instance");
    print!("{xml}");
    // the canonical form is a fixpoint
    assert_eq!(write_instance(&parse_instance(&xml).unwrap()).unwrap(), xml);
}
