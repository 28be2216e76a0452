# Routes for solve, verify, enumerate and decompose reports
