qc = QuantumCircuit(2)
qc.myrot(0)
...
