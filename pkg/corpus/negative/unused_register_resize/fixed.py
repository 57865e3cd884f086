qreg = QuantumRegister(2)
creg = ClassicalRegister(2)
aux = ClassicalRegister(3)
qc = QuantumCircuit(qreg, creg)
qc.h(0)
...
