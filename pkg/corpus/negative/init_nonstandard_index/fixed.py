qc = QuantumCircuit(2)
qc.initialize(1)
...
