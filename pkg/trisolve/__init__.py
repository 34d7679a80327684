"""trisolve: multiple solutions of semilinear Dirichlet problems at desk scale."""
