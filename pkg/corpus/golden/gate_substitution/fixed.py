qc = QuantumCircuit(2)
circuit.h(0)
qc.x(1)
...
