qreg = QuantumRegister(2)
creg = ClassicalRegister(2)
aux = ClassicalRegister(2)
qc = QuantumCircuit(qreg, creg)
qc.h(0)
...
