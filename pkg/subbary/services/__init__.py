# Service layer: geometry kernel, profile engine, invariants, worked example, verifier
